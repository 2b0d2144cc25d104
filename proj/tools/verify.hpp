#pragma once

#include <iosfwd>

// Exhaustive small-n invariant checks; returns the number of failures.
int run_verify(std::ostream& out);
