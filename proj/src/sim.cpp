#include "fieldrank/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace fieldrank {

SynthData synth_generate(const SynthConfig& cfg) {
    if (cfg.rows <= 0 || cfg.cols <= 0) throw std::invalid_argument("synth: bad grid size");
    if (cfg.rank <= 0 || cfg.rank > std::min(cfg.rows * cfg.cols, cfg.t_train))
        throw std::invalid_argument("synth: bad rank");
    if (cfg.t_train <= 0 || cfg.t_test <= 0) throw std::invalid_argument("synth: bad T");
    if (cfg.missing_prob < 0 || cfg.missing_prob >= 1)
        throw std::invalid_argument("synth: missing_prob must be in [0,1)");
    if (cfg.noise_sigma < 0) throw std::invalid_argument("synth: negative noise_sigma");
    if (cfg.smoothness <= 0) throw std::invalid_argument("synth: smoothness must be positive");

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Low-frequency relative to the grid: wavelengths of ~10 cells or longer.
    std::uniform_int_distribution<int> freq(0, std::max(3, std::min(cfg.rows, cfg.cols) / 5));

    auto region = std::make_shared<Region>(Region::full(cfg.rows, cfg.cols));
    const int L = region->num_valid();
    const int k = cfg.rank;

    // Spatial factors: each row of Y* is a nonnegative mixture of 2-D
    // low-frequency cosine fields.
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(k, L);
    for (int i = 0; i < k; ++i) {
        for (int m = 0; m < cfg.smoothness; ++m) {
            int u = freq(rng), v = freq(rng);
            if (u == 0 && v == 0) u = 1;
            double w = unit(rng);
            for (int j = 0; j < L; ++j) {
                auto [r, c] = cell_coords(*region, region->cell_of_dense(j));
                Y(i, j) += w * std::cos(std::numbers::pi * u * r / cfg.rows) *
                           std::cos(std::numbers::pi * v * c / cfg.cols);
            }
        }
    }

    const int T = cfg.t_train + cfg.t_test;
    Eigen::MatrixXd X(k, T);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < k; ++i) X(i, t) = gauss(rng);

    Eigen::MatrixXd truth = X.transpose() * Y;  // T x L

    auto make_snapshot = [&](int t, bool noisy) {
        Snapshot s;
        s.region = region;
        s.values.resize(L);
        for (int j = 0; j < L; ++j) {
            double v = truth(t, j);
            if (noisy) {
                double noise = cfg.noise_sigma > 0 ? cfg.noise_sigma * gauss(rng) : 0.0;
                bool drop = cfg.missing_prob > 0 && unit(rng) < cfg.missing_prob;
                s.values[j] = drop ? std::numeric_limits<double>::quiet_NaN() : v + noise;
            } else {
                s.values[j] = v;
            }
        }
        return s;
    };

    SynthData out;
    out.region = region;
    for (int t = 0; t < cfg.t_train; ++t) out.train.push_back(make_snapshot(t, true));
    for (int t = cfg.t_train; t < T; ++t) out.test.push_back(make_snapshot(t, true));
    for (int t = cfg.t_train; t < T; ++t) out.truth.push_back(make_snapshot(t, false));
    return out;
}

ObservationSet simulate_observations(const Snapshot& snapshot, const SamplePlan& plan) {
    ObservationSet obs;
    const Region& region = *snapshot.region;
    for (CellId c : plan.cells) {
        int d = region.dense_index(c);
        if (snapshot.has(d)) obs[d] = snapshot.values[d];
    }
    return obs;
}

double reconstruction_error(const Eigen::VectorXd& pred, const Snapshot& truth,
                            const std::vector<int>& sampled_dense, bool include_sampled) {
    if (pred.size() != truth.values.size())
        throw std::invalid_argument("reconstruction_error: length mismatch");
    std::vector<bool> sampled(pred.size(), false);
    for (int d : sampled_dense) {
        if (d < 0 || d >= pred.size())
            throw std::out_of_range("reconstruction_error: sampled index out of range");
        sampled[d] = true;
    }
    double sum = 0.0;
    int n = 0;
    for (Eigen::Index j = 0; j < pred.size(); ++j) {
        if (!truth.has(static_cast<int>(j))) continue;
        if (!include_sampled && sampled[j]) continue;
        double r = pred[j] - truth.values[j];
        sum += r * r;
        ++n;
    }
    return n == 0 ? 0.0 : sum / n;
}

double complete_condition_mse(const LowRankModel& model, const std::vector<Snapshot>& test) {
    double sum = 0.0;
    int n = 0;
    for (const auto& snap : test) {
        ObservationSet obs;
        for (int j = 0; j < snap.values.size(); ++j)
            if (snap.has(j)) obs[j] = snap.values[j];
        if (obs.empty()) continue;
        Completion c = complete(model, obs);
        sum += reconstruction_error(c.values, snap, {}, true);
        ++n;
    }
    return n == 0 ? 0.0 : sum / n;
}

SamplePlan plan_for_method(const std::string& method, const LowRankModel& model,
                           const Region& region, CellId start, double budget,
                           const TrialProtocol& protocol, std::uint64_t seed) {
    if (method == "greedy") {
        PlannerConfig pc;
        pc.budget = budget;
        pc.jitter = protocol.jitter;
        pc.info_tol = protocol.info_tol;
        pc.candidate_pool = protocol.candidate_pool;
        pc.seed = seed;
        return plan(model.Y, region, start, pc);
    }
    if (method.rfind("transect-", 0) == 0)
        return transect(region, start, transect_direction_from_name(method.substr(9)), budget);
    if (method == "random") return random_walk(region, start, budget, seed);
    throw std::invalid_argument("unknown method '" + method + "'");
}

namespace {

std::pair<double, double> mean_se(const std::vector<double>& xs) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (xs.empty()) return {nan, nan};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0));
    return {mean, sd / std::sqrt(static_cast<double>(xs.size()))};
}

}  // namespace

std::vector<AggregateRow> aggregate_reports(const std::vector<TrialReport>& reports,
                                            const std::vector<std::string>& methods,
                                            const std::vector<double>& budgets) {
    std::vector<AggregateRow> rows;
    for (const auto& method : methods) {
        for (double budget : budgets) {
            AggregateRow row;
            row.method = method;
            row.budget = budget;
            std::vector<double> fishers, mses;
            for (const auto& r : reports) {
                if (r.method != method || r.budget != budget || r.excluded) continue;
                fishers.push_back(r.fisher);
                if (r.recon_mse) mses.push_back(*r.recon_mse);
            }
            row.n_trials = static_cast<int>(fishers.size());
            std::tie(row.mean_fisher, row.se_fisher) = mean_se(fishers);
            std::tie(row.mean_mse, row.se_mse) = mean_se(mses);
            rows.push_back(row);
        }
    }
    return rows;
}

TrialResults run_trials(const Region& region, const std::vector<Snapshot>& test,
                        const LowRankModel& model, const TrialProtocol& protocol) {
    if (test.empty()) throw std::invalid_argument("run_trials: empty test set");
    if (model.L() != region.num_valid())
        throw std::invalid_argument("run_trials: model/region size mismatch");

    // Distinct random valid starting cells.
    std::mt19937_64 rng(protocol.seed);
    std::vector<CellId> starts;
    {
        std::vector<int> dense(region.num_valid());
        for (int i = 0; i < region.num_valid(); ++i) dense[i] = i;
        std::shuffle(dense.begin(), dense.end(), rng);
        int n = std::min<int>(protocol.n_starts, region.num_valid());
        for (int i = 0; i < n; ++i) starts.push_back(region.cell_of_dense(dense[i]));
    }

    TrialResults out;
    std::uint64_t trial_seed = protocol.seed;
    for (const auto& method : protocol.methods) {
        for (double budget : protocol.budgets) {
            for (std::size_t si = 0; si < starts.size(); ++si) {
                int repeats = method == "random" ? protocol.n_random : 1;
                for (int rep = 0; rep < repeats; ++rep) {
                    ++trial_seed;
                    SamplePlan p = plan_for_method(method, model, region, starts[si], budget,
                                                   protocol, trial_seed);
                    std::vector<int> sampled;
                    for (CellId c : p.cells) sampled.push_back(region.dense_index(c));

                    TrialReport rep_row;
                    rep_row.method = method;
                    rep_row.budget = budget;
                    rep_row.start = starts[si];
                    rep_row.repeat = rep;
                    rep_row.fisher = fisher_info(model.Y, sampled, protocol.jitter);

                    int min_obs_count = std::numeric_limits<int>::max();
                    double mse_sum = 0.0;
                    int mse_n = 0;
                    for (const auto& snap : test) {
                        ObservationSet obs = simulate_observations(snap, p);
                        min_obs_count = std::min(min_obs_count, static_cast<int>(obs.size()));
                        if (obs.empty()) continue;
                        Completion c = complete(model, obs);
                        mse_sum += reconstruction_error(c.values, snap, sampled, false);
                        ++mse_n;
                    }
                    rep_row.n_observations = min_obs_count;
                    rep_row.excluded = min_obs_count < protocol.min_obs;
                    if (!rep_row.excluded && mse_n > 0) rep_row.recon_mse = mse_sum / mse_n;
                    out.reports.push_back(std::move(rep_row));
                }
            }
        }
    }
    std::sort(out.reports.begin(), out.reports.end(), [](const auto& a, const auto& b) {
        return std::tie(a.method, a.budget, a.start, a.repeat) <
               std::tie(b.method, b.budget, b.start, b.repeat);
    });
    out.aggregates = aggregate_reports(out.reports, protocol.methods, protocol.budgets);
    return out;
}

void store_report_csv(const std::vector<TrialReport>& reports,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write report CSV " + path.string());
    out.precision(17);
    out << "method,budget,start_index,repeat,n_obs,fisher,recon_mse,excluded\n";
    for (const auto& r : reports) {
        out << r.method << ',' << r.budget << ',' << r.start << ',' << r.repeat << ','
            << r.n_observations << ',' << r.fisher << ',';
        if (r.recon_mse)
            out << *r.recon_mse;
        else
            out << "nan";
        out << ',' << (r.excluded ? 1 : 0) << '\n';
    }
}

void store_aggregate_csv(const std::vector<AggregateRow>& rows,
                         const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write aggregate CSV " + path.string());
    out.precision(17);
    out << "method,budget,mean_fisher,se_fisher,mean_mse,se_mse,n_trials\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.budget << ',' << r.mean_fisher << ',' << r.se_fisher << ','
            << r.mean_mse << ',' << r.se_mse << ',' << r.n_trials << '\n';
    }
}

Snapshot error_heatmap(const Eigen::VectorXd& pred, const Snapshot& truth) {
    if (pred.size() != truth.values.size())
        throw std::invalid_argument("error_heatmap: length mismatch");
    Snapshot h;
    h.region = truth.region;
    h.values.setConstant(pred.size(), std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index j = 0; j < pred.size(); ++j)
        if (truth.has(static_cast<int>(j))) h.values[j] = std::abs(pred[j] - truth.values[j]);
    return h;
}

}  // namespace fieldrank
