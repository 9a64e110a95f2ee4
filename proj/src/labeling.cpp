#include "cumident/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "cumident/error.hpp"

namespace cumident {

namespace {

constexpr double kTinyDiag = 1e-300;

std::string format_permutation(const std::vector<int>& p)
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < p.size(); ++i)
        os << (i ? "," : "") << p[i];
    os << ')';
    return os.str();
}

struct SignScore {
    int mismatches = 0;
    double mass = 0.0;
};

SignScore sign_score_row(const MatrixXd& lt, int src, int pos, const SignPattern& pattern)
{
    SignScore s;
    const double diag = lt(src, pos);
    for (Eigen::Index j = 0; j < lt.cols(); ++j) {
        const int want = pattern(pos, j);
        if (want == 0)
            continue;
        const double v = (j == pos) ? 1.0 : lt(src, j) / diag;
        if ((v > 0.0 ? 1 : (v < 0.0 ? -1 : 0)) != want) {
            ++s.mismatches;
            s.mass += std::abs(v);
        }
    }
    return s;
}

double upper_mass_row(const MatrixXd& lt, int src, int pos)
{
    double m = 0.0;
    const double diag = lt(src, pos);
    for (Eigen::Index j = pos + 1; j < lt.cols(); ++j) {
        const double v = lt(src, j) / diag;
        m += v * v;
    }
    return m;
}

void validate_pattern(const SignPattern& pattern, Eigen::Index d)
{
    if (pattern.rows() != d || pattern.cols() != d)
        throw InputError("sign pattern must be " + std::to_string(d) + " x " + std::to_string(d));
    if ((pattern.array() < -1).any() || (pattern.array() > 1).any())
        throw InputError("sign pattern entries must be -1, 0 or +1");
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = a + 1; b < d; ++b)
            if (pattern.row(a) == pattern.row(b))
                throw LabelingError("sign pattern rows " + std::to_string(a) + " and " + std::to_string(b) +
                                    " coincide; sign labeling needs pairwise distinct rows");
}

LabelingResult finish(const MatrixXd& lt, std::vector<int> perm)
{
    LabelingResult res;
    res.lambda_final = apply_labeling(lt, perm);
    res.scales.resize(lt.rows());
    for (Eigen::Index i = 0; i < lt.rows(); ++i)
        res.scales(i) = lt(perm[i], i);
    res.permutation = std::move(perm);
    return res;
}

}  // namespace

MatrixXd apply_labeling(const MatrixXd& lambda_tilde, const std::vector<int>& permutation)
{
    const Eigen::Index d = lambda_tilde.rows();
    if (static_cast<Eigen::Index>(permutation.size()) != d || lambda_tilde.cols() != d)
        throw InputError("labeling permutation does not match the matrix size");
    MatrixXd out(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double diag = lambda_tilde(permutation[i], i);
        if (std::abs(diag) < kTinyDiag)
            throw LabelingError("zero diagonal entry after permutation " + format_permutation(permutation));
        out.row(i) = lambda_tilde.row(permutation[i]) / diag;
        out(i, i) = 1.0;
    }
    return out;
}

LabelingResult label_by_signs(const DemixingEstimate& est, const SignPattern& pattern)
{
    return label_by_signs(est.lambda_tilde, pattern);
}

LabelingResult label_by_signs(const MatrixXd& lt, const SignPattern& pattern)
{
    const Eigen::Index d = lt.rows();
    validate_pattern(pattern, d);

    if (d > kExhaustiveLabelingMax) {
        std::vector<int> perm(d, -1);
        std::vector<bool> used(d, false);
        SignScore total;
        for (Eigen::Index pos = 0; pos < d; ++pos) {
            int best = -1;
            SignScore best_score{std::numeric_limits<int>::max(), 0.0};
            for (Eigen::Index src = 0; src < d; ++src) {
                if (used[src] || std::abs(lt(src, pos)) < kTinyDiag)
                    continue;
                const SignScore s = sign_score_row(lt, static_cast<int>(src), static_cast<int>(pos), pattern);
                if (s.mismatches < best_score.mismatches ||
                    (s.mismatches == best_score.mismatches && s.mass < best_score.mass)) {
                    best = static_cast<int>(src);
                    best_score = s;
                }
            }
            if (best < 0)
                throw LabelingError("greedy sign labeling found no admissible row for position " +
                                    std::to_string(pos));
            used[best] = true;
            perm[pos] = best;
            total.mismatches += best_score.mismatches;
            total.mass += best_score.mass;
        }
        LabelingResult res = finish(lt, perm);
        res.residual_mismatch = total.mismatches;
        res.violation_mass = total.mass;
        res.warnings.push_back("d > 8: greedy sign assignment used instead of exhaustive search");
        return res;
    }

    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best_perm, runner_up;
    SignScore best{std::numeric_limits<int>::max(), std::numeric_limits<double>::infinity()};
    bool tie = false;
    do {
        bool admissible = true;
        SignScore total;
        for (Eigen::Index pos = 0; pos < d && admissible; ++pos) {
            if (std::abs(lt(perm[pos], pos)) < kTinyDiag) {
                admissible = false;
                break;
            }
            const SignScore s = sign_score_row(lt, perm[pos], static_cast<int>(pos), pattern);
            total.mismatches += s.mismatches;
            total.mass += s.mass;
        }
        if (!admissible)
            continue;
        const bool same_count = total.mismatches == best.mismatches;
        const bool same_mass = std::abs(total.mass - best.mass) <= 1e-12 * (1.0 + best.mass);
        if (total.mismatches < best.mismatches || (same_count && !same_mass && total.mass < best.mass)) {
            best = total;
            best_perm = perm;
            tie = false;
        } else if (same_count && same_mass) {
            tie = true;
            runner_up = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (best_perm.empty())
        throw LabelingError("no permutation yields a nonzero diagonal");
    if (tie)
        throw LabelingError("ambiguous sign labeling: permutations " + format_permutation(best_perm) + " and " +
                            format_permutation(runner_up) + " fit the pattern equally well");
    LabelingResult res = finish(lt, best_perm);
    res.residual_mismatch = best.mismatches;
    res.violation_mass = best.mass;
    return res;
}

LabelingResult label_by_triangular(const DemixingEstimate& est)
{
    return label_by_triangular(est.lambda_tilde);
}

LabelingResult label_by_triangular(const MatrixXd& lt)
{
    const Eigen::Index d = lt.rows();
    if (lt.cols() != d)
        throw InputError("triangular labeling needs a square matrix");

    if (d > kExhaustiveLabelingMax) {
        // Fill positions from the bottom: the last row of a lower-triangular
        // matrix has no above-diagonal constraint, the first has the most.
        std::vector<int> perm(d, -1);
        std::vector<bool> used(d, false);
        double total = 0.0;
        for (Eigen::Index pos = 0; pos < d; ++pos) {
            int best = -1;
            double best_mass = std::numeric_limits<double>::infinity();
            for (Eigen::Index src = 0; src < d; ++src) {
                if (used[src] || std::abs(lt(src, pos)) < kTinyDiag)
                    continue;
                const double m = upper_mass_row(lt, static_cast<int>(src), static_cast<int>(pos));
                if (m < best_mass) {
                    best_mass = m;
                    best = static_cast<int>(src);
                }
            }
            if (best < 0)
                throw LabelingError("greedy triangular labeling found no admissible row");
            used[best] = true;
            perm[pos] = best;
            total += best_mass;
        }
        LabelingResult res = finish(lt, perm);
        res.residual_mismatch = total;
        res.warnings.push_back("d > 8: greedy triangular ordering used instead of exhaustive search");
        return res;
    }

    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best_perm;
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        bool admissible = true;
        for (Eigen::Index pos = 0; pos < d; ++pos) {
            if (std::abs(lt(perm[pos], pos)) < kTinyDiag) {
                admissible = false;
                break;
            }
            total += upper_mass_row(lt, perm[pos], static_cast<int>(pos));
        }
        if (admissible && total < best) {
            best = total;
            best_perm = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best_perm.empty())
        throw LabelingError("no permutation yields a nonzero diagonal");
    LabelingResult res = finish(lt, best_perm);
    res.residual_mismatch = best;
    return res;
}

}  // namespace cumident
