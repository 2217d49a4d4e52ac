#pragma once

#include <doctest.h>

#include "namegender/error.hpp"

// Asserts that `expr` throws namegender::Error carrying `expected`.
#define CHECK_THROWS_CODE(expr, expected)                                  \
  do {                                                                     \
    bool thrown_ = false;                                                  \
    try {                                                                  \
      (void)(expr);                                                        \
    } catch (const namegender::Error& e_) {                                \
      thrown_ = true;                                                      \
      CHECK_MESSAGE(e_.code() == (expected), e_.what());                   \
    }                                                                      \
    CHECK_MESSAGE(thrown_, "expected namegender::Error from " #expr);      \
  } while (0)
