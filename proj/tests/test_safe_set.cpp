#include <doctest.h>

#include <Eigen/Dense>

#include "gso/safe_set.hpp"

using namespace gso;

namespace {

ParamGrid line_grid(int n, double lo_v = 0.0, double hi_v = 1.0) {
    Eigen::VectorXd lo(1), hi(1);
    lo[0] = lo_v;
    hi[0] = hi_v;
    return make_uniform_grid(lo, hi, {n});
}

BoundsTable table_like(const ParamGrid& grid, int q) {
    BoundsTable t;
    t.q = q;
    t.lower = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(grid.size()), q + 1,
                                        -std::numeric_limits<double>::infinity());
    t.upper = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(grid.size()), q + 1,
                                        std::numeric_limits<double>::infinity());
    return t;
}

}  // namespace

TEST_CASE("seeding validates indices") {
    SafeSet s = make_safe_set(5, {1, 3}, 2.0);
    CHECK(s.count() == 2);
    CHECK(s.member[1] == 1);
    CHECK(s.member[3] == 1);
    CHECK_THROWS_AS((void)make_safe_set(5, {}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)make_safe_set(5, {5}, 1.0), std::invalid_argument);
}

TEST_CASE("expansion admits exactly the points a member certifies") {
    // Grid 0, 0.25, 0.5, 0.75, 1 with L = 1: a lower bound of 0.3 at the
    // middle point reaches one step (0.25 cost) but not two (0.5 cost).
    ParamGrid grid = line_grid(5);
    SafeSet s = make_safe_set(grid.size(), {2}, 1.0);
    BoundsTable t = table_like(grid, 1);
    t.lower(2, 1) = 0.3;

    SafeSet s1 = safe_set_expand(s, t, grid);
    CHECK(s1.member == std::vector<std::uint8_t>{0, 1, 1, 1, 0});

    // Boundary case: exactly L*d qualifies.
    t.lower(2, 1) = 0.5;
    SafeSet s2 = safe_set_expand(s, t, grid);
    CHECK(s2.count() == 5);
}

TEST_CASE("expansion needs every constraint certified, possibly by different members") {
    ParamGrid grid = line_grid(3, 0.0, 2.0);  // 0, 1, 2
    SafeSet s = make_safe_set(grid.size(), {0, 2}, 1.0);
    BoundsTable t = table_like(grid, 2);
    // Left member certifies constraint 1 at the middle; right member
    // certifies constraint 2 there. Neither certifies both alone.
    t.lower(0, 1) = 1.2;
    t.lower(0, 2) = -std::numeric_limits<double>::infinity();
    t.lower(2, 1) = -std::numeric_limits<double>::infinity();
    t.lower(2, 2) = 1.2;

    SafeSet s1 = safe_set_expand(s, t, grid);
    CHECK(s1.member[1] == 1);

    // Drop one side: the middle no longer joins.
    t.lower(2, 2) = 0.5;
    SafeSet s2 = safe_set_expand(s, t, grid);
    CHECK(s2.member[1] == 0);
}

TEST_CASE("expansion is monotone and idempotent on a fixed table") {
    ParamGrid grid = line_grid(9);
    SafeSet s = make_safe_set(grid.size(), {4}, 1.0);
    BoundsTable t = table_like(grid, 1);
    t.lower(4, 1) = 0.2;

    SafeSet s1 = safe_set_expand(s, t, grid);
    for (std::size_t i = 0; i < s.member.size(); ++i)
        if (s.member[i]) CHECK(s1.member[i] == 1);
    SafeSet s2 = safe_set_expand(s1, t, grid);
    CHECK(s2.member == s1.member);  // newly added members carry no lower bound
}

TEST_CASE("expanders are members whose optimistic value could reach outside") {
    ParamGrid grid = line_grid(5);
    SafeSet s = make_safe_set(grid.size(), {1, 2}, 1.0);
    s.member[3] = 1;
    BoundsTable t = table_like(grid, 1);
    t.upper(1, 1) = 0.1;   // too weak: nearest outside point costs 0.25
    t.upper(2, 1) = -0.2;  // certainly unsafe margin, certifies nothing
    t.upper(3, 1) = 0.3;   // reaches index 4 (0.25 away)

    std::vector<int> e = compute_expanders(s, t, grid);
    CHECK(e == std::vector<int>{3});
}

TEST_CASE("maximizers are members optimistically at least as good as the best pessimist") {
    ParamGrid grid = line_grid(4);
    SafeSet s = make_safe_set(grid.size(), {0, 1, 2}, 1.0);
    BoundsTable t = table_like(grid, 1);
    t.lower(0, 0) = 0.5;  // best pessimistic objective
    t.upper(0, 0) = 0.9;
    t.lower(1, 0) = 0.0;
    t.upper(1, 0) = 0.6;  // could still beat 0.5
    t.lower(2, 0) = 0.0;
    t.upper(2, 0) = 0.4;  // cannot

    std::vector<int> m = compute_maximizers(s, t);
    CHECK(m == std::vector<int>{0, 1});
}

TEST_CASE("acquisition picks the widest candidate over all outputs, ties low") {
    ParamGrid grid = line_grid(4);
    BoundsTable t = table_like(grid, 1);
    for (int a = 0; a < 4; ++a) {
        t.lower(a, 0) = 0.0;
        t.upper(a, 0) = 0.1;
        t.lower(a, 1) = 0.0;
        t.upper(a, 1) = 0.1;
    }
    t.upper(2, 1) = 1.0;  // widest via the constraint column
    LseSets sets;
    sets.expanders = {1, 2};
    sets.maximizers = {3};
    CHECK(lse_acquire(sets, t) == 2);

    t.upper(2, 1) = 0.1;
    t.upper(3, 0) = 1.0;  // widest via the objective column, from maximizers
    CHECK(lse_acquire(sets, t) == 3);

    t.upper(3, 0) = 0.1;  // all equal: lowest index among candidates
    CHECK(lse_acquire(sets, t) == 1);

    LseSets empty;
    CHECK(lse_acquire(empty, t) == -1);
}

TEST_CASE("convergence needs small widths and a stable safe set") {
    ParamGrid grid = line_grid(3);
    BoundsTable t = table_like(grid, 1);
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i <= 1; ++i) {
            t.lower(a, i) = 0.0;
            t.upper(a, i) = 0.05;
        }
    LseSets sets;
    sets.expanders = {0};
    sets.maximizers = {1};
    SafeSet s = make_safe_set(grid.size(), {0}, 1.0);

    CHECK(lse_converged(sets, t, s, s, 0.1));
    t.upper(1, 0) = 0.5;
    CHECK_FALSE(lse_converged(sets, t, s, s, 0.1));

    SafeSet grown = s;
    grown.member[1] = 1;
    t.upper(1, 0) = 0.05;
    CHECK_FALSE(lse_converged(sets, t, s, grown, 0.1));

    LseSets none;
    CHECK(lse_converged(none, t, s, s, 0.1));
}

TEST_CASE("closure fixpoint matches a hand-computed chain with margin") {
    // Grid 0..4 step 1, L = 1, eps = 0.1. g = [1.5, 1.2, 0.05, 2.0, -1.0].
    // From index 0: reaches 1 (1.5-0.1-1 >= 0), then 2 (1.2-0.1-1 >= 0), but
    // index 2 is too weak to reach 3, and 0/1 are too far (cost 3, 2).
    ParamGrid grid = line_grid(5, 0.0, 4.0);
    Eigen::MatrixXd g(5, 1);
    g << 1.5, 1.2, 0.05, 2.0, -1.0;

    std::vector<std::uint8_t> in = reachability_closure(grid, g, {0}, 0.1, 1.0);
    CHECK(in == std::vector<std::uint8_t>{1, 1, 1, 0, 0});

    // Larger margin stops after the first hop.
    std::vector<std::uint8_t> tight = reachability_closure(grid, g, {0}, 0.45, 1.0);
    CHECK(tight == std::vector<std::uint8_t>{1, 1, 0, 0, 0});

    // Membership follows certificates only: a strong member admits both of
    // its neighbors, whatever the table says about them.
    std::vector<std::uint8_t> right = reachability_closure(grid, g, {3}, 0.1, 1.0);
    CHECK(right == std::vector<std::uint8_t>{0, 0, 1, 1, 1});
}

TEST_CASE("closure with multiple constraint columns requires all of them") {
    ParamGrid grid = line_grid(2, 0.0, 1.0);
    Eigen::MatrixXd g(2, 2);
    g << 2.0, 1.05, 0.0, 0.0;  // second column barely certifies the hop at eps=0
    CHECK(reachability_closure(grid, g, {0}, 0.0, 1.0) ==
          std::vector<std::uint8_t>{1, 1});
    CHECK(reachability_closure(grid, g, {0}, 0.1, 1.0) ==
          std::vector<std::uint8_t>{1, 0});
}
