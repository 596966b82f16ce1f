#pragma once

// The three benchmark groups used across the test suites, built in code so
// tests do not depend on config file paths.

#include "relhyp/group_model.hpp"

namespace testgroups {

using relhyp::group_model::Factor;
using relhyp::group_model::GroupSpec;

/** F2 = <a> * <b>: plain free group, no peripheral subgroups. */
inline GroupSpec f2() {
    return GroupSpec::make({Factor{"A", 1, false, {"a"}}, Factor{"B", 1, false, {"b"}}});
}

/** Z^2 * Z = <s,t | [s,t]> * <u>, peripheral {<s,t>}. */
inline GroupSpec z2z() {
    return GroupSpec::make({Factor{"P", 2, true, {"s", "t"}}, Factor{"F", 1, false, {"u"}}});
}

/** Z^2 * Z^2, both factors peripheral. */
inline GroupSpec z2z2() {
    return GroupSpec::make({Factor{"P", 2, true, {"s", "t"}}, Factor{"Q", 2, true, {"v", "w"}}});
}

}  // namespace testgroups
