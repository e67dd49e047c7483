#include "nest/tsne.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "nest/detmath.hpp"
#include "nest/rng.hpp"

namespace nest::tsne {

namespace {

constexpr double kPFloor = 1e-12;

// content hash of one row: little-endian f64 bytes, order-preserving
std::uint64_t row_hash(const std::vector<double>& row) {
    std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
    for (double v : row) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

// approximate standard normal from 12 uniforms (Irwin-Hall)
double gauss12(Rng& rng) {
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += rng.next_f64();
    return s - 6.0;
}

// conditional affinities for one row via binary search on the precision
void conditional_p(const std::vector<double>& d2_row, int self, double log_perp,
                   std::vector<double>& p_out, std::vector<double>& scratch) {
    const int n = static_cast<int>(d2_row.size());
    double beta = 1.0;
    double beta_min = 0.0;
    double beta_max = std::numeric_limits<double>::infinity();
    double sum_p = 0.0;

    for (int it = 0; it < 64; ++it) {
        scratch.clear();
        for (int j = 0; j < n; ++j) {
            if (j == self) continue;
            scratch.push_back(std::exp(-beta * d2_row[j]));
        }
        sum_p = detmath::stable_sum(scratch);

        double entropy;
        if (sum_p <= 0.0) {
            entropy = 0.0;  // everything underflowed; beta is far too large
        } else {
            scratch.clear();
            for (int j = 0; j < n; ++j) {
                if (j == self) continue;
                scratch.push_back(d2_row[j] * std::exp(-beta * d2_row[j]));
            }
            double sum_dp = detmath::stable_sum(scratch);
            entropy = std::log(sum_p) + beta * sum_dp / sum_p;
        }

        double diff = entropy - log_perp;
        if (std::fabs(diff) < 1e-5) break;
        if (diff > 0.0) {  // entropy too high -> sharpen
            beta_min = beta;
            beta = std::isinf(beta_max) ? beta * 2.0 : 0.5 * (beta + beta_max);
        } else {
            beta_max = beta;
            beta = beta_min == 0.0 ? beta * 0.5 : 0.5 * (beta + beta_min);
        }
    }

    for (int j = 0; j < n; ++j) {
        if (j == self || sum_p <= 0.0) {
            p_out[j] = 0.0;
            continue;
        }
        p_out[j] = std::exp(-beta * d2_row[j]) / sum_p;
    }
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& w, int n,
                     double w_total, std::vector<double>& scratch) {
    scratch.clear();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            double pij = p[static_cast<std::size_t>(i) * n + j];
            if (pij <= 0.0) continue;
            double qij = w[static_cast<std::size_t>(i) * n + j] / w_total;
            if (qij < kPFloor) qij = kPFloor;
            scratch.push_back(pij * std::log(pij / qij));
        }
    return detmath::stable_sum(scratch);
}

}  // namespace

EmbeddingResult run_tsne(const std::vector<std::vector<double>>& rows, const TsneConfig& cfg,
                         std::uint64_t seed) {
    const int n = static_cast<int>(rows.size());
    if (n < 3) throw std::invalid_argument("tsne: need at least 3 rows");
    if (!(cfg.perplexity > 0.0) || cfg.perplexity >= static_cast<double>(n))
        throw std::invalid_argument("tsne: perplexity must be in (0, N)");
    if (cfg.iterations < 1) throw std::invalid_argument("tsne: iterations must be >= 1");
    const std::size_t dim = rows[0].size();
    if (dim == 0) throw std::invalid_argument("tsne: rows must be non-empty");
    for (const auto& r : rows) {
        if (r.size() != dim) throw std::invalid_argument("tsne: ragged input rows");
        for (double v : r)
            if (!std::isfinite(v)) throw std::invalid_argument("tsne: non-finite input");
    }

    const std::size_t nn = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);

    // pairwise squared distances; (i,j) and (j,i) are computed identically
    std::vector<double> d2(nn, 0.0);
    std::vector<double> scratch;
    scratch.reserve(nn);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            scratch.clear();
            for (std::size_t k = 0; k < dim; ++k) {
                double d = rows[static_cast<std::size_t>(i)][k] - rows[static_cast<std::size_t>(j)][k];
                scratch.push_back(d * d);
            }
            d2[static_cast<std::size_t>(i) * n + j] = detmath::stable_sum(scratch);
        }

    // conditional then symmetrized joint affinities
    std::vector<double> p_cond(nn, 0.0);
    {
        std::vector<double> d2_row(static_cast<std::size_t>(n));
        std::vector<double> p_row(static_cast<std::size_t>(n));
        double log_perp = std::log(cfg.perplexity);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) d2_row[static_cast<std::size_t>(j)] = d2[static_cast<std::size_t>(i) * n + j];
            conditional_p(d2_row, i, log_perp, p_row, scratch);
            for (int j = 0; j < n; ++j) p_cond[static_cast<std::size_t>(i) * n + j] = p_row[static_cast<std::size_t>(j)];
        }
    }
    std::vector<double> p(nn, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            p[static_cast<std::size_t>(i) * n + j] =
                (p_cond[static_cast<std::size_t>(i) * n + j] + p_cond[static_cast<std::size_t>(j) * n + i]) /
                (2.0 * static_cast<double>(n));
        }

    // initial layout from content hashes so identical rows coincide and row
    // order is irrelevant
    std::vector<std::array<double, 2>> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng rng(mix_seed(seed, row_hash(rows[static_cast<std::size_t>(i)])));
        y[static_cast<std::size_t>(i)][0] = gauss12(rng) * 1e-4;
        y[static_cast<std::size_t>(i)][1] = gauss12(rng) * 1e-4;
    }

    std::vector<std::array<double, 2>> update(static_cast<std::size_t>(n), {0.0, 0.0});
    std::vector<double> w(nn, 0.0);

    auto compute_w = [&]() -> double {
        scratch.clear();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                double dx = y[static_cast<std::size_t>(i)][0] - y[static_cast<std::size_t>(j)][0];
                double dy = y[static_cast<std::size_t>(i)][1] - y[static_cast<std::size_t>(j)][1];
                double wij = 1.0 / (1.0 + dx * dx + dy * dy);
                w[static_cast<std::size_t>(i) * n + j] = wij;
                w[static_cast<std::size_t>(j) * n + i] = wij;
                scratch.push_back(wij);
            }
        return 2.0 * detmath::stable_sum(scratch);
    };

    EmbeddingResult out;
    out.seed = seed;
    out.iterations = cfg.iterations;

    double w_total = compute_w();
    out.kl_initial = kl_divergence(p, w, n, w_total, scratch);

    std::vector<double> gx_terms, gy_terms, mean_terms;
    gx_terms.reserve(static_cast<std::size_t>(n));
    gy_terms.reserve(static_cast<std::size_t>(n));
    mean_terms.reserve(static_cast<std::size_t>(n));

    for (int iter = 0; iter < cfg.iterations; ++iter) {
        double exaggeration = iter < cfg.exaggeration_iters ? cfg.early_exaggeration : 1.0;
        double momentum = iter < cfg.momentum_switch_iter ? cfg.momentum_start : cfg.momentum_late;
        if (iter > 0) w_total = compute_w();

        for (int i = 0; i < n; ++i) {
            gx_terms.clear();
            gy_terms.clear();
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                std::size_t idx = static_cast<std::size_t>(i) * n + j;
                double coeff = (exaggeration * p[idx] - w[idx] / w_total) * w[idx];
                gx_terms.push_back(coeff * (y[static_cast<std::size_t>(i)][0] - y[static_cast<std::size_t>(j)][0]));
                gy_terms.push_back(coeff * (y[static_cast<std::size_t>(i)][1] - y[static_cast<std::size_t>(j)][1]));
            }
            double gx = 4.0 * detmath::stable_sum(gx_terms);
            double gy = 4.0 * detmath::stable_sum(gy_terms);
            update[static_cast<std::size_t>(i)][0] =
                momentum * update[static_cast<std::size_t>(i)][0] - cfg.learning_rate * gx;
            update[static_cast<std::size_t>(i)][1] =
                momentum * update[static_cast<std::size_t>(i)][1] - cfg.learning_rate * gy;
        }
        for (int i = 0; i < n; ++i) {
            y[static_cast<std::size_t>(i)][0] += update[static_cast<std::size_t>(i)][0];
            y[static_cast<std::size_t>(i)][1] += update[static_cast<std::size_t>(i)][1];
        }

        // re-center every iteration
        for (int axis = 0; axis < 2; ++axis) {
            mean_terms.clear();
            for (int i = 0; i < n; ++i) mean_terms.push_back(y[static_cast<std::size_t>(i)][static_cast<std::size_t>(axis)]);
            double mean = detmath::stable_sum(mean_terms) / static_cast<double>(n);
            for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)][static_cast<std::size_t>(axis)] -= mean;
        }
    }

    w_total = compute_w();
    out.kl_final = kl_divergence(p, w, n, w_total, scratch);
    out.coords = std::move(y);
    return out;
}

EmbeddingResult run_tsne(const std::vector<std::vector<double>>& rows, double perplexity,
                         int iterations, std::uint64_t seed) {
    TsneConfig cfg;
    cfg.perplexity = perplexity;
    cfg.iterations = iterations;
    return run_tsne(rows, cfg, seed);
}

}  // namespace nest::tsne
