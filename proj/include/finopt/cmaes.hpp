// CMA-ES over the nine trajectory parameters. Internally the search space is
// the unit box [0,1]^9 (affine rescaling of the parameter bounds) so one
// scalar step size is meaningful across degrees, radians, and hertz.
// Sampling is unconstrained; candidates are clamped to the box for
// evaluation while the raw samples drive the distribution update. State is
// snapshottable to versioned JSON and branchable into independent runs.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "finopt/common.hpp"
#include "finopt/kinematics.hpp"

namespace finopt::cmaes {

inline constexpr int kDim = kinematics::kNumParams;
inline constexpr int kSnapshotSchemaVersion = 1;
inline constexpr const char* kSnapshotSchemaId = "finopt.cmaes.snapshot";

using Vector = Eigen::Matrix<double, kDim, 1>;
using Matrix = Eigen::Matrix<double, kDim, kDim>;

inline int default_population_size() {
    return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(kDim))));
}

// Affine map between physical parameters and the unit box.
inline Vector to_unit(const std::array<double, kDim>& physical) {
    const auto& b = kinematics::param_bounds();
    Vector u;
    for (int i = 0; i < kDim; ++i)
        u(i) = (physical[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)].min) /
               (b[static_cast<std::size_t>(i)].max - b[static_cast<std::size_t>(i)].min);
    return u;
}

inline std::array<double, kDim> to_physical(const Vector& unit) {
    const auto& b = kinematics::param_bounds();
    std::array<double, kDim> p{};
    for (int i = 0; i < kDim; ++i)
        p[static_cast<std::size_t>(i)] =
            b[static_cast<std::size_t>(i)].min +
            unit(i) * (b[static_cast<std::size_t>(i)].max - b[static_cast<std::size_t>(i)].min);
    return p;
}

// Convergence thresholds (Table 1 column) in unit-box coordinates.
inline Vector unit_thresholds() {
    const auto& b = kinematics::param_bounds();
    Vector t;
    for (int i = 0; i < kDim; ++i)
        t(i) = b[static_cast<std::size_t>(i)].convergence /
               (b[static_cast<std::size_t>(i)].max - b[static_cast<std::size_t>(i)].min);
    return t;
}

struct Candidate {
    Vector raw;  // unit-box coordinates, unclamped
    kinematics::TrajectoryParams projected;  // clamped, evaluable
};

struct ConvergenceReport {
    std::array<bool, kDim> per_parameter{};
    bool overall = false;
    std::array<double, kDim> spread{};  // sigma * sqrt(C_ii), unit-box units
};

class CmaesState {
public:
    CmaesState() = default;

    // mean = initialization, C = ((max-min)/4)^2 per axis (1/16 in unit
    // coordinates), sigma0 = 0.3, lambda = 4 + floor(3 ln n) unless given.
    static CmaesState init(const kinematics::TrajectoryParams& initialization,
                           std::uint64_t seed, int lambda = 0,
                           double sigma0 = 0.3) {
        const auto report = kinematics::validate(initialization);
        if (!report.pass) {
            std::string what = "initialization out of bounds:";
            for (const auto& f : report.fields)
                if (!f.in_range) what += " " + f.name + " (" + f.violated_bound + ")";
            throw OutOfBounds(what);
        }
        CmaesState s;
        s.mean_ = to_unit(initialization.to_array());
        s.cov_ = Matrix::Identity() * (1.0 / 16.0);
        s.sigma_ = sigma0;
        s.path_sigma_.setZero();
        s.path_cov_.setZero();
        s.generation_ = 0;
        s.lambda_ = lambda > 0 ? lambda : default_population_size();
        s.rng_.seed(seed);
        return s;
    }

    int population_size() const { return lambda_; }
    int generation() const { return generation_; }
    double step_size() const { return sigma_; }
    const Vector& mean() const { return mean_; }
    const Matrix& covariance() const { return cov_; }

    // Samples lambda candidates from N(mean, sigma^2 C); the raw draws are
    // kept for the next tell(), the projected (clamped) parameters are what
    // gets evaluated.
    std::vector<Candidate> ask() {
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_);
        const Matrix transform =
            eig.eigenvectors() *
            eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
        std::normal_distribution<double> gauss(0.0, 1.0);
        pending_.clear();
        pending_.reserve(static_cast<std::size_t>(lambda_));
        for (int k = 0; k < lambda_; ++k) {
            Vector z;
            for (int i = 0; i < kDim; ++i) z(i) = gauss(rng_);
            Candidate c;
            c.raw = mean_ + sigma_ * (transform * z);
            Vector clamped = c.raw.cwiseMax(0.0).cwiseMin(1.0);
            c.projected = kinematics::TrajectoryParams::from_array(to_physical(clamped));
            pending_.push_back(c);
        }
        return pending_;
    }

    // Standard rank-mu + rank-one update on the raw samples, ranked by the
    // fitness of the projected candidates. A generation with no fitness
    // signal (all values equal) leaves the distribution untouched.
    void tell(const std::vector<double>& fitnesses) {
        if (pending_.empty() || fitnesses.size() != pending_.size())
            throw Error("tell: fitness count does not match the asked candidates");
        bool any_finite = false;
        for (double f : fitnesses) any_finite = any_finite || std::isfinite(f);
        if (!any_finite) throw AllCandidatesFailed("every candidate in the generation failed");

        const int n = kDim;
        std::vector<int> order(fitnesses.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return fitnesses[static_cast<std::size_t>(a)] <
                   fitnesses[static_cast<std::size_t>(b)];
        });

        const auto [lo, hi] = std::minmax_element(fitnesses.begin(), fitnesses.end());
        if (*lo == *hi) {
            // no selection information
            pending_.clear();
            ++generation_;
            return;
        }

        // recombination weights and learning rates (Hansen tutorial defaults)
        const int mu = lambda_ / 2;
        std::vector<double> w(static_cast<std::size_t>(mu));
        double wsum = 0.0;
        for (int i = 0; i < mu; ++i) {
            w[static_cast<std::size_t>(i)] =
                std::log((lambda_ + 1) / 2.0) - std::log(i + 1.0);
            wsum += w[static_cast<std::size_t>(i)];
        }
        double w2 = 0.0;
        for (auto& wi : w) {
            wi /= wsum;
            w2 += wi * wi;
        }
        const double mu_eff = 1.0 / w2;
        const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
        const double d_sigma =
            1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
        const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
        const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
        const double c_mu = std::min(
            1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) * (n + 2.0) + mu_eff));
        const double chi_n =
            std::sqrt(static_cast<double>(n)) *
            (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

        std::vector<Vector> y(static_cast<std::size_t>(mu));
        Vector y_w = Vector::Zero();
        for (int i = 0; i < mu; ++i) {
            y[static_cast<std::size_t>(i)] =
                (pending_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])].raw -
                 mean_) / sigma_;
            y_w += w[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
        }

        const Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_);
        const Vector d_inv =
            eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt().cwiseInverse();
        const Matrix c_inv_sqrt =
            eig.eigenvectors() * d_inv.asDiagonal() * eig.eigenvectors().transpose();

        // the mean stays raw (possibly outside the unit box): clamping it
        // while candidates remain raw would feed a systematic outward
        // component into the step-size path at boundary optima
        mean_ += sigma_ * y_w;

        path_sigma_ = (1.0 - c_sigma) * path_sigma_ +
                      std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * (c_inv_sqrt * y_w);
        const double ps_norm = path_sigma_.norm();
        const double h_denom =
            std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (generation_ + 1)));
        const bool h_sigma = ps_norm / h_denom < (1.4 + 2.0 / (n + 1.0)) * chi_n;

        path_cov_ = (1.0 - c_c) * path_cov_;
        if (h_sigma)
            path_cov_ += std::sqrt(c_c * (2.0 - c_c) * mu_eff) * y_w;

        Matrix rank_mu = Matrix::Zero();
        for (int i = 0; i < mu; ++i)
            rank_mu += w[static_cast<std::size_t>(i)] *
                       (y[static_cast<std::size_t>(i)] *
                        y[static_cast<std::size_t>(i)].transpose());
        const double delta_h = (1.0 - (h_sigma ? 1.0 : 0.0)) * c_c * (2.0 - c_c);
        cov_ = (1.0 - c_1 - c_mu) * cov_ +
               c_1 * (path_cov_ * path_cov_.transpose() + delta_h * cov_) +
               c_mu * rank_mu;

        sigma_ *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));

        repair_covariance();
        pending_.clear();
        ++generation_;
    }

    ConvergenceReport converged() const {
        ConvergenceReport r;
        const Vector thresholds = unit_thresholds();
        r.overall = true;
        for (int i = 0; i < kDim; ++i) {
            r.spread[static_cast<std::size_t>(i)] = sigma_ * std::sqrt(cov_(i, i));
            r.per_parameter[static_cast<std::size_t>(i)] =
                r.spread[static_cast<std::size_t>(i)] < thresholds(i);
            r.overall = r.overall && r.per_parameter[static_cast<std::size_t>(i)];
        }
        return r;
    }

    // Per-parameter spread in physical units (for logs and reports).
    std::array<double, kDim> physical_spread() const {
        const auto& b = kinematics::param_bounds();
        std::array<double, kDim> s{};
        for (int i = 0; i < kDim; ++i)
            s[static_cast<std::size_t>(i)] =
                sigma_ * std::sqrt(cov_(i, i)) *
                (b[static_cast<std::size_t>(i)].max - b[static_cast<std::size_t>(i)].min);
        return s;
    }

    nlohmann::json snapshot() const {
        nlohmann::json j;
        j["schema"] = kSnapshotSchemaId;
        j["version"] = kSnapshotSchemaVersion;
        j["generation"] = generation_;
        j["lambda"] = lambda_;
        j["sigma"] = sigma_;
        j["mean"] = std::vector<double>(mean_.data(), mean_.data() + kDim);
        j["path_sigma"] =
            std::vector<double>(path_sigma_.data(), path_sigma_.data() + kDim);
        j["path_cov"] =
            std::vector<double>(path_cov_.data(), path_cov_.data() + kDim);
        std::vector<double> c(kDim * kDim);
        Eigen::Map<Matrix>(c.data()) = cov_;
        j["covariance"] = c;
        // mt19937-64 state as its textual integer words
        std::ostringstream os;
        os << rng_;
        std::vector<std::uint64_t> words;
        std::istringstream is(os.str());
        std::uint64_t word = 0;
        while (is >> word) words.push_back(word);
        j["rng_words"] = words;
        nlohmann::json pend = nlohmann::json::array();
        for (const auto& c2 : pending_)
            pend.push_back(std::vector<double>(c2.raw.data(), c2.raw.data() + kDim));
        j["pending_raw"] = pend;
        return j;
    }

    static CmaesState restore(const nlohmann::json& j) {
        if (!j.contains("schema") || j.at("schema") != kSnapshotSchemaId ||
            !j.contains("version") ||
            j.at("version").get<int>() != kSnapshotSchemaVersion) {
            throw SchemaMismatch("unrecognized snapshot schema or version");
        }
        CmaesState s;
        s.generation_ = j.at("generation").get<int>();
        s.lambda_ = j.at("lambda").get<int>();
        s.sigma_ = j.at("sigma").get<double>();
        const auto mean = j.at("mean").get<std::vector<double>>();
        const auto ps = j.at("path_sigma").get<std::vector<double>>();
        const auto pc = j.at("path_cov").get<std::vector<double>>();
        const auto cov = j.at("covariance").get<std::vector<double>>();
        s.mean_ = Eigen::Map<const Vector>(mean.data());
        s.path_sigma_ = Eigen::Map<const Vector>(ps.data());
        s.path_cov_ = Eigen::Map<const Vector>(pc.data());
        s.cov_ = Eigen::Map<const Matrix>(cov.data());
        const auto words = j.at("rng_words").get<std::vector<std::uint64_t>>();
        std::ostringstream os;
        for (std::size_t i = 0; i < words.size(); ++i)
            os << (i ? " " : "") << words[i];
        std::istringstream is(os.str());
        is >> s.rng_;
        for (const auto& raw : j.at("pending_raw")) {
            Candidate c;
            const auto v = raw.get<std::vector<double>>();
            c.raw = Eigen::Map<const Vector>(v.data());
            Vector clamped = c.raw.cwiseMax(0.0).cwiseMin(1.0);
            c.projected =
                kinematics::TrajectoryParams::from_array(to_physical(clamped));
            s.pending_.push_back(c);
        }
        return s;
    }

private:
    void repair_covariance() {
        cov_ = (0.5 * (cov_ + cov_.transpose())).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_);
        if (eig.eigenvalues().minCoeff() < 1e-14) {
            const Vector floored = eig.eigenvalues().cwiseMax(1e-14);
            cov_ = eig.eigenvectors() * floored.asDiagonal() *
                   eig.eigenvectors().transpose();
            cov_ = (0.5 * (cov_ + cov_.transpose())).eval();
        }
    }

    Vector mean_ = Vector::Zero();
    Matrix cov_ = Matrix::Identity();
    double sigma_ = 0.3;
    Vector path_sigma_ = Vector::Zero();
    Vector path_cov_ = Vector::Zero();
    int generation_ = 0;
    int lambda_ = 0;
    std::mt19937_64 rng_;
    std::vector<Candidate> pending_;
};

// Lowest fitness wins; ties break to the lowest candidate index.
inline std::size_t select_optimum(const std::vector<double>& fitnesses) {
    if (fitnesses.empty()) throw Error("select_optimum: empty generation");
    std::size_t best = 0;
    for (std::size_t i = 1; i < fitnesses.size(); ++i)
        if (fitnesses[i] < fitnesses[best]) best = i;
    return best;
}

}  // namespace finopt::cmaes
