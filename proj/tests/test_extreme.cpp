#include <cmath>
#include <doctest.h>
#include <set>

#include "ecotab/extreme.hpp"
#include "helpers.hpp"

using namespace ecotab;
using ecotab::testing::random_margins;

namespace {

const MarginPair kMargins4x4({44, 37, 57, 62}, {57, 58, 42, 43});

// Known extreme fixtures for kMargins4x4, stored in permuted order together
// with the generating pairs (0-based destination maps).
struct Fixture {
  PermutationPair perms;
  std::vector<int> permuted;
};

const Fixture kZ1{{{2, 3, 0, 1}, {1, 0, 2, 3}},
                  {57, 0, 0, 0, 1, 57, 4, 0, 0, 0, 38, 6, 0, 0, 0, 37}};
const Fixture kZ2{{{0, 2, 1, 3}, {1, 3, 0, 2}},
                  {42, 2, 0, 0, 0, 55, 2, 0, 0, 0, 37, 0, 0, 0, 4, 58}};
const Fixture kZ3{{{2, 1, 0, 3}, {1, 2, 3, 0}},
                  {43, 14, 0, 0, 0, 37, 0, 0, 0, 6, 38, 0, 0, 0, 20, 42}};

// Maps a permuted-order fixture back to original category order.
std::vector<int> unpermute(const Fixture& f, int rows, int cols) {
  std::vector<int> src_r(static_cast<std::size_t>(rows));
  std::vector<int> src_c(static_cast<std::size_t>(cols));
  for (int k = 0; k < rows; ++k) src_r[static_cast<std::size_t>(f.perms.rows[k])] = k;
  for (int k = 0; k < cols; ++k) src_c[static_cast<std::size_t>(f.perms.cols[k])] = k;
  std::vector<int> orig(static_cast<std::size_t>(rows) * cols);
  for (int a = 0; a < rows; ++a) {
    for (int b = 0; b < cols; ++b) {
      orig[static_cast<std::size_t>(src_r[a]) * cols + src_c[b]] =
          f.permuted[static_cast<std::size_t>(a) * cols + b];
    }
  }
  return orig;
}

std::vector<int> permute_entries(std::span<const int> entries, const PermutationPair& perms,
                                 int rows, int cols) {
  std::vector<int> out(entries.size());
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      out[static_cast<std::size_t>(perms.rows[i]) * cols + perms.cols[j]] =
          entries[static_cast<std::size_t>(i) * cols + j];
    }
  }
  return out;
}

}  // namespace

TEST_CASE("the corner walk reproduces the known 4x4 extreme tables") {
  for (const Fixture* f : {&kZ1, &kZ2, &kZ3}) {
    const ExtremeTable z = build_extreme(kMargins4x4, f->perms);
    CHECK(z.permuted_entries() == f->permuted);
    CHECK(z.table.entries() == unpermute(*f, 4, 4));
  }
}

TEST_CASE("identity permutations on unit margins give the diagonal") {
  const ExtremeTable z = build_extreme(MarginPair({1, 1}, {1, 1}), PermutationPair::identity(2, 2));
  CHECK(z.table.entries() == std::vector<int>{1, 0, 0, 1});
}

TEST_CASE("margins are reproduced for random permutations") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int rows = 2 + static_cast<int>(rng.uniform() * 3);
    const int cols = 2 + static_cast<int>(rng.uniform() * 3);
    const MarginPair m = random_margins(rng, rows, cols, 15 + static_cast<int>(rng.uniform() * 40));
    PermutationPair perms = PermutationPair::identity(rows, cols);
    for (int i = rows - 1; i > 0; --i) std::swap(perms.rows[i], perms.rows[static_cast<int>(rng.uniform() * (i + 1))]);
    for (int j = cols - 1; j > 0; --j) std::swap(perms.cols[j], perms.cols[static_cast<int>(rng.uniform() * (j + 1))]);
    // the FreqTable inside ExtremeTable revalidates the margins
    CHECK_NOTHROW(build_extreme(m, perms));
  }
}

TEST_CASE("all four permutation pairs of unit margins collapse to two tables") {
  const auto extremes = enumerate_extremes(MarginPair({1, 1}, {1, 1}));
  REQUIRE(extremes.size() == 2);
  std::set<std::vector<int>> keys;
  for (const auto& z : extremes) keys.insert(z.table.entries());
  CHECK(keys.contains(std::vector<int>{1, 0, 0, 1}));
  CHECK(keys.contains(std::vector<int>{0, 1, 1, 0}));
}

TEST_CASE("distinct extremes are members of the full table collection") {
  const MarginPair m({8, 20, 12}, {12, 7, 21});
  std::set<std::vector<int>> members;
  fold_tables(m, 0, [&](const TableView& t, int&) {
    members.insert(std::vector<int>(t.entries.begin(), t.entries.end()));
  });
  const auto extremes = enumerate_extremes(m);
  CHECK(extremes.size() <= 36);
  std::set<std::vector<int>> keys;
  for (const auto& z : extremes) {
    CHECK(members.contains(z.table.entries()));
    CHECK(keys.insert(z.table.entries()).second);  // pairwise distinct
  }
}

TEST_CASE("the distinct 4x4 extreme set contains the known fixtures") {
  const auto extremes = enumerate_extremes(kMargins4x4);
  std::set<std::vector<int>> keys;
  for (const auto& z : extremes) keys.insert(z.table.entries());
  for (const Fixture* f : {&kZ1, &kZ2, &kZ3}) CHECK(keys.contains(unpermute(*f, 4, 4)));
}

TEST_CASE("the permutation budget is enforced") {
  std::vector<int> six(static_cast<std::size_t>(6), 6);
  CHECK_THROWS_AS(enumerate_extremes(MarginPair(six, six)), BudgetError);
}

TEST_CASE("completion of the 2x2 diagonal puts double weight on xi") {
  const ExtremeTable z = build_extreme(MarginPair({1, 1}, {1, 1}), PermutationPair::identity(2, 2));
  const XiLogOdds x = epsilon_complete(z, 50.0);
  CHECK(x.order(1, 1) == 2);
  CHECK(x.offset(1, 1) == 0.0);
  CHECK(x.lambda(1, 1) == doctest::Approx(100.0));
  CHECK(x.zero(0, 0));
  CHECK(x.zero(0, 1));
  CHECK(x.zero(1, 0));
  CHECK_FALSE(x.zero(1, 1));
}

TEST_CASE("completion of a fully positive table returns finite log odds") {
  const FreqTable t(MarginPair({3, 3}, {3, 3}), {2, 1, 1, 2});
  const XiLogOdds x = epsilon_complete(t, PermutationPair::identity(2, 2), 10.0);
  CHECK(x.order(1, 1) == 0);
  CHECK(x.offset(1, 1) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK_FALSE(x.zero(1, 1));
}

TEST_CASE("completion of the first 4x4 fixture classifies every interior cell") {
  const ExtremeTable z = build_extreme(kMargins4x4, kZ1.perms);
  const XiLogOdds x = epsilon_complete(z, 20.0);
  // expected orders in permuted layout, interior cells only
  const int expected[3][3] = {{1, 1, 0}, {0, 2, 2}, {0, 0, 2}};
  for (int i = 1; i < 4; ++i) {
    for (int j = 1; j < 4; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      CHECK(x.order(i, j) == expected[i - 1][j - 1]);
      CHECK(std::isfinite(x.offset(i, j)));
    }
  }
  CHECK(x.offset(1, 1) == doctest::Approx(std::log(57.0 * 57.0 / 1.0)).epsilon(1e-12));
  CHECK(x.offset(2, 2) == doctest::Approx(std::log(57.0 * 38.0)).epsilon(1e-12));
  // first row and column carry no log-odds
  for (int k = 0; k < 4; ++k) {
    CHECK(x.order(0, k) == 0);
    CHECK(x.order(k, 0) == 0);
    CHECK(x.zero(0, k));
    CHECK(x.zero(k, 0));
  }
}

TEST_CASE("a zero cell with positive anchors is rejected as non-extreme") {
  // row swap of the first fixture: the staircase is broken
  const FreqTable t(MarginPair({62, 57, 44, 37}, {58, 57, 42, 43}),
                    {1, 57, 4, 0, 57, 0, 0, 0, 0, 0, 38, 6, 0, 0, 0, 37});
  CHECK_THROWS_AS(epsilon_complete(t, PermutationPair::identity(4, 4), 10.0), InputError);
  CHECK_FALSE(monotone_order_check(t, PermutationPair::identity(4, 4)));
}

TEST_CASE("monotone order structure holds for constructed extremes") {
  for (const Fixture* f : {&kZ1, &kZ2, &kZ3}) {
    CHECK(monotone_order_check(build_extreme(kMargins4x4, f->perms)));
  }
  CHECK(monotone_order_check(build_extreme(MarginPair({1, 1}, {1, 1}),
                                           PermutationPair::identity(2, 2))));
  for (const ExtremeTable& z : enumerate_extremes(MarginPair({8, 20, 12}, {12, 7, 21}))) {
    CHECK(monotone_order_check(z));
  }
}

TEST_CASE("extreme tables dominate every tail sum of the permuted collection") {
  const MarginPair m({8, 20, 12}, {12, 7, 21});
  const auto coll = enumerate_tables(m);
  for (const ExtremeTable& z : enumerate_extremes(m)) {
    const auto zp = z.permuted_entries();
    // tail sums of the permuted extreme table
    auto tail = [&](std::span<const int> e, int i0, int j0) {
      long long s = 0;
      for (int i = i0; i < 3; ++i) {
        for (int j = j0; j < 3; ++j) s += e[static_cast<std::size_t>(i) * 3 + j];
      }
      return s;
    };
    for (std::size_t k = 0; k < coll.size(); ++k) {
      const auto np = permute_entries(coll.entries(k), z.perms, 3, 3);
      for (int i = 1; i < 3; ++i) {
        for (int j = 1; j < 3; ++j) {
          CHECK(tail(zp, i, j) >= tail(np, i, j));
        }
      }
    }
  }
}

TEST_CASE("extreme tables of the 3x3 margins carry at least three zeros") {
  for (const ExtremeTable& z : enumerate_extremes(MarginPair({8, 20, 12}, {12, 7, 21}))) {
    int zeros = 0;
    for (int v : z.table.entries()) zeros += v == 0;
    CHECK(zeros >= 3);
  }
}
