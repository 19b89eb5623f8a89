#include "fieldrank/glrm.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace fieldrank {

namespace {

void check_coverage(const DataMatrix& data) {
    for (int t = 0; t < data.T(); ++t) {
        if (!data.mask.row(t).any())
            throw std::invalid_argument("fit: row " + std::to_string(t) +
                                        " has no observed entries");
    }
    for (int j = 0; j < data.L(); ++j) {
        if (!data.mask.col(j).any())
            throw std::invalid_argument("fit: column " + std::to_string(j) +
                                        " has no observed entries");
    }
}

// Solve (A_S A_S^T + ridge I) z = A_S b_S for one row/column subproblem.
Eigen::VectorXd masked_ls(const Eigen::MatrixXd& A, const std::vector<int>& sel,
                          const Eigen::VectorXd& b, double ridge) {
    const int k = static_cast<int>(A.rows());
    Eigen::MatrixXd G = ridge * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    for (std::size_t i = 0; i < sel.size(); ++i) {
        const auto a = A.col(sel[i]);
        G.noalias() += a * a.transpose();
        rhs.noalias() += a * b[static_cast<Eigen::Index>(i)];
    }
    if (ridge > 0.0) return G.llt().solve(rhs);
    // ridge = 0: G may be singular; fall back to minimum-norm solve
    return G.completeOrthogonalDecomposition().solve(rhs);
}

}  // namespace

FitResult fit(const DataMatrix& data, const FitConfig& cfg) {
    const int T = data.T();
    const int L = data.L();
    if (cfg.rank <= 0) throw std::invalid_argument("fit: rank must be positive");
    if (cfg.rank > std::min(T, L))
        throw std::invalid_argument("fit: rank " + std::to_string(cfg.rank) +
                                    " exceeds min(T,L) = " + std::to_string(std::min(T, L)));
    if (cfg.max_iters <= 0 || cfg.rel_tol <= 0 || cfg.ridge < 0)
        throw std::invalid_argument("fit: bad config");
    check_coverage(data);

    const int k = cfg.rank;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    FitResult res;
    auto& X = res.model.X;
    auto& Y = res.model.Y;
    X.resize(k, T);
    Y.resize(k, L);
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    for (int j = 0; j < T; ++j)
        for (int i = 0; i < k; ++i) X(i, j) = gauss(rng) * scale;
    for (int j = 0; j < L; ++j)
        for (int i = 0; i < k; ++i) Y(i, j) = gauss(rng) * scale;

    // Per-row and per-column observed index lists.
    std::vector<std::vector<int>> row_obs(T), col_obs(L);
    for (int t = 0; t < T; ++t)
        for (int j = 0; j < L; ++j)
            if (data.mask(t, j)) {
                row_obs[t].push_back(j);
                col_obs[j].push_back(t);
            }

    double prev_reg = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.max_iters; ++it) {
        // Hold Y, solve each column of X over that row's observed cells.
        for (int t = 0; t < T; ++t) {
            const auto& sel = row_obs[t];
            Eigen::VectorXd b(sel.size());
            for (std::size_t i = 0; i < sel.size(); ++i)
                b[static_cast<Eigen::Index>(i)] = data.values(t, sel[i]);
            X.col(t) = masked_ls(Y, sel, b, cfg.ridge);
        }
        // Hold X, solve each column of Y over that cell's observed times.
        for (int j = 0; j < L; ++j) {
            const auto& sel = col_obs[j];
            Eigen::VectorXd b(sel.size());
            for (std::size_t i = 0; i < sel.size(); ++i)
                b[static_cast<Eigen::Index>(i)] = data.values(sel[i], j);
            Y.col(j) = masked_ls(X, sel, b, cfg.ridge);
        }

        double obj = objective(res.model, data);
        double reg = obj + cfg.ridge * (X.squaredNorm() + Y.squaredNorm());
        res.objective_history.push_back(obj);
        res.regularized_history.push_back(reg);
        res.iterations = it + 1;
        if (std::isfinite(prev_reg) && prev_reg > 0.0 &&
            (prev_reg - reg) / prev_reg < cfg.rel_tol)
            break;
        if (reg == 0.0) break;
        prev_reg = reg;
    }
    if (!res.model.X.allFinite() || !res.model.Y.allFinite())
        throw NumericalError("fit: non-finite factors");
    return res;
}

double objective(const LowRankModel& model, const DataMatrix& data) {
    if (model.T() != data.T() || model.L() != data.L())
        throw std::invalid_argument("objective: model/data shape mismatch");
    double sum = 0.0;
    for (int t = 0; t < data.T(); ++t) {
        for (int j = 0; j < data.L(); ++j) {
            if (!data.mask(t, j)) continue;
            double r = model.X.col(t).dot(model.Y.col(j)) - data.values(t, j);
            sum += r * r;
        }
    }
    return sum;
}

Eigen::VectorXd estimate_latent(const Eigen::MatrixXd& Y, const ObservationSet& obs) {
    if (obs.empty()) throw std::invalid_argument("estimate_latent: empty observation set");
    const int k = static_cast<int>(Y.rows());
    const int n = static_cast<int>(obs.size());
    Eigen::MatrixXd Yt(n, k);  // Y_S^T
    Eigen::VectorXd d(n);
    int i = 0;
    for (const auto& [col, val] : obs) {
        if (col < 0 || col >= Y.cols())
            throw std::out_of_range("estimate_latent: cell index " + std::to_string(col) +
                                    " out of range");
        if (!std::isfinite(val))
            throw std::invalid_argument("estimate_latent: non-finite observation");
        Yt.row(i) = Y.col(col).transpose();
        d[i] = val;
        ++i;
    }
    return Yt.completeOrthogonalDecomposition().solve(d);
}

Completion complete(const LowRankModel& model, const ObservationSet& obs) {
    Completion c;
    c.latent = estimate_latent(model.Y, obs);
    c.values = model.Y.transpose() * c.latent;
    c.low_sample = static_cast<int>(obs.size()) < model.rank();
    return c;
}

namespace {

constexpr char kMagic[5] = {'G', 'L', 'R', 'M', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& in, const std::filesystem::path& path) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8))
        throw FormatError(path.string() + ": truncated model header");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

}  // namespace

void save_model(const LowRankModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write model file " + path.string());
    out.write(kMagic, sizeof(kMagic));
    write_u64(out, static_cast<std::uint64_t>(model.rank()));
    write_u64(out, static_cast<std::uint64_t>(model.T()));
    write_u64(out, static_cast<std::uint64_t>(model.L()));
    // row-major on disk
    for (int i = 0; i < model.rank(); ++i)
        for (int j = 0; j < model.T(); ++j) {
            double v = model.X(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
    for (int i = 0; i < model.rank(); ++i)
        for (int j = 0; j < model.L(); ++j) {
            double v = model.Y(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
    if (!out) throw FormatError("write failure on model file " + path.string());
}

LowRankModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open model file " + path.string());
    char magic[5];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError(path.string() + ": bad magic, not a GLRM1 model file");
    auto k = read_u64(in, path);
    auto T = read_u64(in, path);
    auto L = read_u64(in, path);
    if (k == 0 || T == 0 || L == 0 || k > (1u << 20) || T > (1u << 28) || L > (1u << 28))
        throw FormatError(path.string() + ": implausible model dimensions");
    LowRankModel m;
    m.X.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(T));
    m.Y.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(L));
    auto read_matrix = [&](Eigen::MatrixXd& mat) {
        for (Eigen::Index i = 0; i < mat.rows(); ++i)
            for (Eigen::Index j = 0; j < mat.cols(); ++j) {
                double v;
                if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
                    throw FormatError(path.string() + ": truncated matrix payload");
                mat(i, j) = v;
            }
    };
    read_matrix(m.X);
    read_matrix(m.Y);
    char extra;
    if (in.read(&extra, 1))
        throw FormatError(path.string() + ": trailing bytes after model payload");
    return m;
}

}  // namespace fieldrank
