#pragma once

#include <stdexcept>
#include <string>

namespace anonprice {

// Input is well-formed but violates a program constraint (C0/C1/C2).
class feasibility_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operation does not support the given instance or distribution variant.
class unsupported_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A proven invariant failed numerically; indicates a bug, not bad input.
class invariant_violation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace anonprice
