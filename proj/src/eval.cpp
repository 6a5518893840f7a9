#include "ggen/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "ggen/codec.hpp"
#include "ggen/errors.hpp"
#include "ggen/iso.hpp"
#include "ggen/parallel.hpp"

namespace ggen {

namespace {

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
    std::size_t n = std::max(a.size(), b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = i < a.size() ? a[i] : 0.0;
        double y = i < b.size() ? b[i] : 0.0;
        s += std::abs(x - y);
    }
    return 0.5 * s;
}

double kernel_mean(const std::vector<std::vector<double>>& a,
                   const std::vector<std::vector<double>>& b, double sigma) {
    double s = 0.0;
    for (const auto& x : a)
        for (const auto& y : b) {
            double tv = tv_distance(x, y);
            s += std::exp(-tv * tv / (2.0 * sigma * sigma));
        }
    return s / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

}  // namespace

double mmd(const std::vector<std::vector<double>>& set_a,
           const std::vector<std::vector<double>>& set_b, const MmdParams& params) {
    if (set_a.empty() || set_b.empty()) throw DataError("mmd: empty histogram set");
    double kaa = kernel_mean(set_a, set_a, params.sigma);
    double kbb = kernel_mean(set_b, set_b, params.sigma);
    double kab = kernel_mean(set_a, set_b, params.sigma);
    return kaa + kbb - 2.0 * kab;
}

namespace {

// Buckets by WL hash so the exact check runs only within colliding buckets.
struct IsoIndex {
    std::unordered_map<std::uint64_t, std::vector<int>> buckets;
    const std::vector<Graph>* graphs;

    explicit IsoIndex(const std::vector<Graph>& gs) : graphs(&gs) {
        for (std::size_t i = 0; i < gs.size(); ++i)
            buckets[wl_hash(gs[i])].push_back(static_cast<int>(i));
    }
    bool contains(const Graph& g, std::uint64_t h) const {
        auto it = buckets.find(h);
        if (it == buckets.end()) return false;
        for (int i : it->second)
            if (isomorphic(g, (*graphs)[i])) return true;
        return false;
    }
};

}  // namespace

VunResult vun(const std::vector<Graph>& generated, const std::vector<Graph>& training_set,
              Family family) {
    VunResult r;
    if (generated.empty()) return r;
    const int n = static_cast<int>(generated.size());

    std::vector<std::uint64_t> hashes(n);
    std::vector<char> valid(n, 0);
    parallel_chunks(n, 16, [&](int, int begin, int end) {
        for (int i = begin; i < end; ++i) {
            hashes[i] = wl_hash(generated[i]);
            valid[i] = is_valid(generated[i], family) ? 1 : 0;
        }
    });

    IsoIndex train_index(training_set);
    std::unordered_map<std::uint64_t, std::vector<int>> seen;
    int n_valid = 0, n_unique = 0, n_novel = 0, n_vun = 0;
    for (int i = 0; i < n; ++i) {
        bool first_occurrence = true;
        auto& bucket = seen[hashes[i]];
        for (int j : bucket)
            if (isomorphic(generated[i], generated[j])) {
                first_occurrence = false;
                break;
            }
        bucket.push_back(i);
        bool novel = !train_index.contains(generated[i], hashes[i]);
        if (valid[i]) n_valid++;
        if (first_occurrence) n_unique++;
        if (novel) n_novel++;
        if (valid[i] && first_occurrence && novel) n_vun++;
    }
    r.valid_pct = 100.0 * n_valid / n;
    r.unique_pct = 100.0 * n_unique / n;
    r.novel_pct = 100.0 * n_novel / n;
    r.vun_pct = 100.0 * n_vun / n;
    return r;
}

MetricReport evaluate_run(const std::vector<std::vector<int>>& samples,
                          const std::vector<Graph>& reference,
                          const std::vector<Graph>& training_set, Family family,
                          const Vocabulary& v, const MmdParams& params) {
    MetricReport report;
    report.sample_count = static_cast<int>(samples.size());
    report.meta["family"] = to_string(family);
    report.meta["kernel_sigma"] = std::to_string(params.sigma);
    report.meta["spectral_bins"] = std::to_string(kSpectrumBins);

    std::vector<Graph> decoded;
    for (const auto& ids : samples) {
        DecodeReport d = decode_ids(ids, v);
        if (d.valid_syntax) decoded.push_back(std::move(*d.graph));
    }
    report.decoded_count = static_cast<int>(decoded.size());

    if (!decoded.empty()) {
        VunResult raw = vun(decoded, training_set, family);
        // rescale to the full sample count: undecodable samples are invalid,
        // non-unique and non-novel
        double f = static_cast<double>(decoded.size()) / report.sample_count;
        report.vun.valid_pct = raw.valid_pct * f;
        report.vun.unique_pct = raw.unique_pct * f;
        report.vun.novel_pct = raw.novel_pct * f;
        report.vun.vun_pct = raw.vun_pct * f;

        auto stats_of = [](const std::vector<Graph>& gs) {
            std::vector<GraphStatistics> out(gs.size());
            parallel_chunks(static_cast<int>(gs.size()), 16, [&](int, int begin, int end) {
                for (int i = begin; i < end; ++i) out[i] = compute_statistics(gs[i]);
            });
            return out;
        };
        std::vector<GraphStatistics> gen_stats = stats_of(decoded);
        std::vector<GraphStatistics> ref_stats = stats_of(reference);

        auto collect = [](const std::vector<GraphStatistics>& ss, auto member) {
            std::vector<std::vector<double>> out;
            out.reserve(ss.size());
            for (const auto& s : ss) out.push_back(s.*member);
            return out;
        };
        report.mmd["degree"] = mmd(collect(gen_stats, &GraphStatistics::degree_hist),
                                   collect(ref_stats, &GraphStatistics::degree_hist), params);
        report.mmd["clustering"] =
            mmd(collect(gen_stats, &GraphStatistics::clustering_hist),
                collect(ref_stats, &GraphStatistics::clustering_hist), params);
        report.mmd["orbit"] = mmd(collect(gen_stats, &GraphStatistics::orbit_hist),
                                  collect(ref_stats, &GraphStatistics::orbit_hist), params);
        report.mmd["spectral"] = mmd(collect(gen_stats, &GraphStatistics::spectrum_hist),
                                     collect(ref_stats, &GraphStatistics::spectrum_hist), params);
    }
    return report;
}

std::string format_report(const MetricReport& report) {
    std::ostringstream os;
    os.precision(12);
    os << "samples: " << report.sample_count << "\n";
    os << "decoded: " << report.decoded_count << "\n";
    for (const auto& [k, val] : report.meta) os << k << ": " << val << "\n";
    os << "valid_pct: " << report.vun.valid_pct << "\n";
    os << "unique_pct: " << report.vun.unique_pct << "\n";
    os << "novel_pct: " << report.vun.novel_pct << "\n";
    os << "vun_pct: " << report.vun.vun_pct << "\n";
    os << "mmd_present: " << (report.mmd.empty() ? "no" : "yes") << "\n";
    os << "\nmetric,value\n";
    for (const auto& [k, val] : report.mmd) os << "mmd_" << k << "," << val << "\n";
    os << "valid," << report.vun.valid_pct << "\n";
    os << "unique," << report.vun.unique_pct << "\n";
    os << "novel," << report.vun.novel_pct << "\n";
    os << "vun," << report.vun.vun_pct << "\n";
    return os.str();
}

void write_report(const std::string& path, const MetricReport& report) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open for writing: " + path);
    f << format_report(report);
}

}  // namespace ggen
