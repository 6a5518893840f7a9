#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ggen/graph.hpp"
#include "ggen/stats.hpp"
#include "ggen/validity.hpp"
#include "ggen/vocab.hpp"

namespace ggen {

// Gaussian kernel over total-variation distance between histograms.
struct MmdParams {
    double sigma = 1.0;
};

// Squared-MMD, biased estimator (diagonal terms included). Histograms are
// zero-padded to a common length. Throws DataError on an empty set.
double mmd(const std::vector<std::vector<double>>& set_a,
           const std::vector<std::vector<double>>& set_b, const MmdParams& params = {});

struct VunResult {
    double valid_pct = 0.0;
    double unique_pct = 0.0;  // first-occurrence uniques
    double novel_pct = 0.0;
    double vun_pct = 0.0;     // valid AND first-occurrence unique AND novel
};

// Percentages over the generated list; uniqueness/novelty by exact
// isomorphism (WL prefilter).
VunResult vun(const std::vector<Graph>& generated, const std::vector<Graph>& training_set,
              Family family);

struct MetricReport {
    std::map<std::string, double> mmd;  // degree/clustering/orbit/spectral; empty if none decodable
    VunResult vun;
    int sample_count = 0;
    int decoded_count = 0;
    std::map<std::string, std::string> meta;
};

// Decodes samples, computes the four MMDs against the reference split and
// V.U.N. against the training split. Undecodable samples count as invalid,
// non-unique and non-novel; with zero decodable samples the MMD block is
// absent. Percentages use the full sample count as denominator.
MetricReport evaluate_run(const std::vector<std::vector<int>>& samples,
                          const std::vector<Graph>& reference,
                          const std::vector<Graph>& training_set, Family family,
                          const Vocabulary& v, const MmdParams& params = {});

std::string format_report(const MetricReport& report);
void write_report(const std::string& path, const MetricReport& report);

}  // namespace ggen
