#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "identities.hpp"

TEST_CASE("commutator identities on a moving interface") {
    const auto r = identities::commutator_residuals();
    INFO("U1 " << r.u1 << " U2 " << r.u2 << " U3 " << r.u3 << " U4 " << r.u4 << " U5 " << r.u5 << " U6 " << r.u6);
    CHECK(r.u1 <= 1e-8);
    CHECK(r.u2 <= 1e-6);
    CHECK(r.u3 <= 1e-6);
    CHECK(r.u4 <= 1e-6);
    CHECK(r.u5 <= 1e-6);
    CHECK(r.u6 <= 1e-6);
}
