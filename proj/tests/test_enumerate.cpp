#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "qpencil/enumerate.hpp"

using namespace qpencil;

namespace {

std::vector<FieldElement> marks(std::uint64_t q, const oracle::Vec& lam) {
    Field f = Field::prime(q);
    std::vector<FieldElement> out;
    for (auto x : lam) out.push_back(f.from_int(x));
    return out;
}

std::set<oracle::Vec> keys(const SubspaceList& list) {
    std::set<oracle::Vec> out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto e = list.raw(i);
        out.insert(oracle::Vec(e.begin(), e.end()));
    }
    return out;
}

}  // namespace

TEST_CASE("points of the base locus match a scan of projective space") {
    for (std::int64_t q : {3, 5, 7}) {
        for (oracle::Vec lam : {oracle::Vec{0, 1, 2, 3, 4}, oracle::Vec{1, 2, 4, 5, 6}, oracle::Vec{0, 1, 2}, oracle::Vec{0, 1, 2, 3}}) {
            bool ok = true;
            for (auto& x : lam) ok = ok && x < q;
            if (!ok) continue;
            CAPTURE(q);
            QuadricPencil p = pencil_from_marks(marks(static_cast<std::uint64_t>(q), lam));
            auto expected = oracle::scan_subspaces(lam, q, 0);
            CHECK(keys(enumerate_subspaces(p, 0)) == expected);
            CHECK(count_points(p) == oracle::base_locus_points(lam, q).size());
        }
    }
}

TEST_CASE("lines match a scan of the Grassmannian at q <= 5") {
    for (std::int64_t q : {3, 5}) {
        for (oracle::Vec lam : {oracle::Vec{0, 1, 2, 3, 4}, oracle::Vec{0, 1, 2, 3}, oracle::Vec{1, 2, 0, 4, 3}}) {
            bool ok = true;
            for (auto& x : lam) ok = ok && x < q;
            if (!ok) continue;
            CAPTURE(q);
            QuadricPencil p = pencil_from_marks(marks(static_cast<std::uint64_t>(q), lam));
            auto found = keys(enumerate_subspaces(p, 1));
            CHECK(found == oracle::scan_subspaces(lam, q, 1));
            CHECK(found == oracle::lines_from_points(lam, q));
        }
    }
    // a singular pencil has many more lines
    oracle::Vec lam{0, 0, 1, 2, 3};
    QuadricPencil p = pencil_from_marks(marks(5, lam));
    CHECK(keys(enumerate_subspaces(p, 1)) == oracle::scan_subspaces(lam, 5, 1));
}

TEST_CASE("lines in P^6 match pairs of orthogonal points") {
    oracle::Vec lam{0, 1, 2, 3, 4, 5, 6};
    QuadricPencil p = pencil_from_marks(marks(7, lam));
    auto found = keys(enumerate_subspaces(p, 1));
    CHECK(found == oracle::lines_from_points(lam, 7));
    CHECK(found.size() == 6672);
}

TEST_CASE("planes in P^6: 64 at a split configuration") {
    oracle::Vec lam{0, 1, 2, 3, 4, 5, 6};
    QuadricPencil p = pencil_from_marks(marks(7, lam));
    SubspaceList planes = enumerate_subspaces(p, 2);
    CHECK(planes.size() == 64);
    CHECK(keys(planes) == oracle::planes_from_lines(lam, 7));
    for (const auto& l : planes.materialize()) CHECK(contained_in_base_locus(l, p));
}

TEST_CASE("count_points golden value") {
    QuadricPencil p = pencil_from_marks(marks(5, {0, 1, 2, 3, 4}));
    std::ifstream in(GOLDEN_DIR "/count_points.txt");
    REQUIRE(in);
    std::string line;
    bool seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        std::uint64_t value = 0;
        ss >> key >> value;
        if (key == "q=5,lambda=0,1,2,3,4") {
            CHECK(count_points(p) == value);
            seen = true;
        }
    }
    CHECK(seen);
}

TEST_CASE("degenerate sizes") {
    // N = 1 with distinct marks: x^2 + y^2 = 0 and a x^2 + b y^2 = 0 meet only at 0
    QuadricPencil line = pencil_from_marks(marks(7, {1, 2}));
    CHECK(count_points(line) == 0);
    CHECK(enumerate_subspaces(line, 0).empty());
    // no hyperplanes in a smooth intersection
    for (std::uint64_t q : {5, 7}) {
        QuadricPencil p = pencil_from_marks(marks(q, {0, 1, 2, 3}));
        CHECK(enumerate_subspaces(p, 2).empty());
        QuadricPencil p5 = pencil_from_marks(marks(q, {0, 1, 2, 3, 4}));
        CHECK(enumerate_subspaces(p5, 3).empty());
    }
}

TEST_CASE("rejections") {
    Field qf = Field::rationals();
    QuadricPencil rational = pencil_from_marks({qf.from_int(0), qf.from_int(1), qf.from_int(2)});
    CHECK_THROWS_AS(enumerate_subspaces(rational, 0), std::invalid_argument);
    CHECK_THROWS_AS(count_points(rational), std::invalid_argument);
    QuadricPencil p = pencil_from_marks(marks(5, {0, 1, 2, 3, 4}));
    CHECK_THROWS_AS(enumerate_subspaces(p, 4), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_subspaces(p, 5), std::invalid_argument);
}

TEST_CASE("output does not depend on the worker count") {
    QuadricPencil p = pencil_from_marks(marks(11, {0, 1, 2, 4, 7}));
    for (std::size_t r : {0u, 1u}) {
        SubspaceList one = enumerate_subspaces(p, r, {1});
        for (unsigned w : {2u, 3u, 8u}) {
            SubspaceList many = enumerate_subspaces(p, r, {w});
            REQUIRE(many.size() == one.size());
            for (std::size_t i = 0; i < one.size(); ++i) CHECK(std::ranges::equal(one.raw(i), many.raw(i)));
        }
    }
    CHECK(count_points(p, {1}) == count_points(p, {4}));
}

TEST_CASE("output is sorted and canonical") {
    QuadricPencil p = pencil_from_marks(marks(5, {0, 1, 2, 3, 4}));
    auto all = enumerate_subspaces(p, 1).materialize();
    REQUIRE(all.size() == 16);
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1] < all[i]);
    for (const auto& l : all) CHECK(LinearSubspace(l.basis()) == l);
}

TEST_CASE("export formats") {
    QuadricPencil p = pencil_from_marks(marks(5, {0, 1, 2, 3, 4}));
    SubspaceList lines = enumerate_subspaces(p, 1);
    std::ostringstream os;
    write_subspaces_text(lines, os);
    std::istringstream in(os.str());
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "r=1 N=4 q=5");
    std::size_t n = 0;
    while (std::getline(in, row)) {
        CHECK(row == lines.at(n).serialize());
        ++n;
    }
    CHECK(n == lines.size());

    auto j = subspaces_to_json(lines);
    CHECK(j["r"] == 1);
    CHECK(j["N"] == 4);
    CHECK(j["q"] == 5);
    CHECK(j["count"] == 16);
    CHECK(j["subspaces"].size() == 16);
    CHECK(j["subspaces"][0].size() == 2);
    CHECK(j["subspaces"][0][0].size() == 5);
}

TEST_CASE("fixed locus of the sign flip is the original base locus") {
    for (std::uint64_t q : {7, 11}) {
        auto lam = marks(q, {0, 1, 2, 3, 4});
        for (std::size_t r : {0u, 1u}) {
            FixedLocusComparison c = compare_fixed_locus(lam, default_extra_mark(lam), r);
            CAPTURE(q);
            CAPTURE(r);
            CHECK(c.passed());
            CHECK(c.through_pole == 0);
            CHECK(c.fixed == c.direct);
        }
    }
}

TEST_CASE("direct and branch tests agree on every subspace of the lifted base locus") {
    for (std::uint64_t q : {7, 11}) {
        auto lam = marks(q, {0, 1, 2, 3, 4});
        QuadricPencil lifted = lifted_pencil(lam, default_extra_mark(lam));
        for (std::size_t r : {0u, 1u}) {
            for (const auto& l : enumerate_subspaces(lifted, r).materialize())
                CHECK(involution_fixed(l) == involution_fixed_by_branches(l));
        }
    }
}

TEST_CASE("the extra mark does not change the fixed locus") {
    auto lam = marks(7, {0, 1, 2, 3, 4});
    Field f = Field::prime(7);
    FixedLocusComparison a = compare_fixed_locus(lam, f.from_int(5), 0);
    FixedLocusComparison b = compare_fixed_locus(lam, f.from_int(6), 0);
    CHECK(a.passed());
    CHECK(b.passed());
    CHECK(a.fixed == b.fixed);
}
