#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "qpencil/quasiparabolic.hpp"

namespace qpencil {

inline constexpr const char* kSchemaVersion = "1.0";

/// (4^g - 1) / 3. Throws std::invalid_argument for g < 1.
mpz_class verlinde(int g);

/// 1-based index sets: S holds the odd coefficients, T the even ones.
struct ParityPartition {
    std::vector<int> S;
    std::vector<int> T;
};

/// Partition of {1, ..., 2g+2} by the parity of the coefficient of w_j.
ParityPartition weierstrass_partition(int g, const std::vector<long long>& coefficients);

struct CensusOptions {
    unsigned workers = 1;
};

struct SplittingCount {
    int a = 0;
    std::uint64_t candidates = 0;  // canonical flag tuples examined
    std::uint64_t stable = 0;      // isomorphism classes counted
};

struct BundleCensus {
    std::uint64_t count = 0;
    std::vector<SplittingCount> breakdown;  // a = 0, ..., floor(g/2)
};

/// Flag tuples for O(a) + O(-a) in canonical form, one per orbit of the
/// automorphism group among tuples on which the group acts freely (every stable
/// tuple is one of them). Encoded as values 0..q-1 for (x : 1) and q for (1 : 0).
/// Calls fn for each; stops early when fn returns false.
void for_each_canonical_candidate(int g, std::uint64_t q, int a, const std::function<bool(const std::vector<std::uint32_t>&)>& fn);

/// The representative of the orbit of `bundle` under Aut(O(a) + O(b)) / scalars, with
/// b = -a. Throws std::invalid_argument when the action on the tuple is not free
/// (never the case for stable bundles).
QPBundle canonical_form(const QPBundle& bundle);

/// Flags from the 0..q encoding above.
std::vector<Flag> decode_flags(Field field, const std::vector<std::uint32_t>& values);

/// Stable degree-0 quasiparabolic bundles up to isomorphism over F_q, per splitting type.
BundleCensus census_bundles(int g, const std::vector<FieldElement>& lambdas, const CensusOptions& options = {});

/// Number of (g-2)-dimensional subspaces of Q1 and Q2 over F_q.
std::uint64_t census_subspaces(int g, const std::vector<FieldElement>& lambdas, const CensusOptions& options = {});

struct CensusReport {
    int g = 0;
    std::uint64_t q = 0;
    std::vector<FieldElement> lambda;
    std::uint64_t bundle_count = 0;
    std::uint64_t subspace_count = 0;
    std::vector<SplittingCount> breakdown;
    std::uint64_t maximal_subspace_count = 0;  // (g-1)-subspaces
    bool fully_split = false;                  // maximal_subspace_count == 2^(2g)
    bool match = false;
    std::string verdict;
    std::vector<std::string> assumptions;

    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
    std::string to_text() const;
};

CensusReport compare_theorem(int g, const std::vector<FieldElement>& lambdas, const CensusOptions& options = {});

struct BettiFit {
    /// Ascending powers of q, trailing zeros removed ({0} for the zero polynomial).
    std::vector<mpq_class> coefficients;
    int degree = 0;
    bool integral = false;
    bool nonnegative = false;
    bool palindromic = false;
    /// degree <= declared dimension (always true when exactly dimension+1 points are given).
    bool within_dimension = false;
};

/// Interpolating polynomial through every (q, count). Throws std::invalid_argument
/// on a repeated q or fewer than dimension + 1 points.
BettiFit betti_fit(const std::vector<std::pair<std::int64_t, mpz_class>>& counts, int dimension);

/// Veronese points (1, l, ..., l^n) of the n+3 values: every n+1 of them
/// independent. Checks the minors and throws std::logic_error if the verdict
/// disagrees with pairwise distinctness.
bool general_position(const std::vector<FieldElement>& lambdas, int n);

/// (-1)^g prod_{i != j} (lambda_i - lambda_j) is a nonzero square for every j.
/// Necessary for all 2^(2g) maximal subspaces to be F_q-rational.
bool split_prefilter(int g, const std::vector<FieldElement>& lambdas);

struct ConfigurationCount {
    std::vector<FieldElement> lambdas;
    std::uint64_t maximal_count = 0;
};

/// All lambda lists {0, 1, x_3 < ... < x_r} over F_q (r = 2g+1) with their counts
/// of (g-1)-subspaces; every affine class of mark sets has such a representative.
/// With prefilter_only, lists failing split_prefilter are skipped.
std::vector<ConfigurationCount> survey_configurations(int g, std::uint64_t q, bool prefilter_only,
                                                      const CensusOptions& options = {});

/// Certified fully-split lists among the survey (at most `limit`, in survey order).
std::vector<std::vector<FieldElement>> find_split_configurations(int g, std::uint64_t q, std::size_t limit,
                                                                 const CensusOptions& options = {});

}  // namespace qpencil
