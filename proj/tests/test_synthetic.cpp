#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>
#include <set>

#include "altc/corpus.hpp"
#include "altc/synthetic.hpp"
#include "altc/textprep.hpp"

namespace altc {
namespace {

TEST_CASE("ProportionalCounts.SumsToTotalAndTracksRatio") {
  const std::vector<double> ratio = {2245, 1284, 540, 472};
  const auto c = proportional_counts(ratio, 4000);
  CHECK_EQ(std::accumulate(c.begin(), c.end(), std::size_t{0}), 4000u);
  const double sum = 2245 + 1284 + 540 + 472;
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK_LE(std::abs(static_cast<double>(c[k]) - 4000.0 * ratio[k] / sum), 1.0);
  }
  CHECK_EQ(proportional_counts(ratio, 4541), (std::vector<std::size_t>{2245, 1284, 540, 472}));
  CHECK_EQ(proportional_counts(std::vector<double>{1, 1, 1}, 10),
            (std::vector<std::size_t>{4, 3, 3}));
}

TEST_CASE("SyntheticWord.DistinctAndStableUnderPreprocessing") {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < 2000; ++i) {
    const auto w = synthetic_word(i);
    CHECK_EQ(normalize(w), w);
    CHECK(seen.insert(w).second);
  }
  CHECK_EQ(synthetic_word(0), "baaa");
  CHECK_EQ(synthetic_word(1), "baab");
}

TEST_CASE("SeparableCorpus.CountsIdsAndDeterminism") {
  SeparableConfig cfg;
  cfg.class_counts = {30, 20, 10};
  cfg.seed = 9;
  const auto a = separable_corpus(cfg);
  CHECK_EQ(a.size(), 60u);
  const auto dist = distribution(a, LabelSchema({"x", "y", "z"}));
  CHECK_EQ(dist.counts, (std::vector<std::size_t>{30, 20, 10}));
  std::set<std::string> ids;
  for (const auto& d : a) CHECK(ids.insert(d.doc.id).second);
  CHECK_EQ(separable_corpus(cfg), a);
  cfg.seed = 10;
  CHECK_NE(separable_corpus(cfg), a);
}

TEST_CASE("GaussianBagCorpus.LengthsCountsAndDeterminism") {
  GaussianBagConfig cfg;
  cfg.class_counts = {50, 30, 20};
  cfg.seed = 3;
  const auto a = gaussian_bag_corpus(cfg);
  REQUIRE_EQ(a.size(), 100u);
  for (const auto& d : a) {
    const auto n = tokenize(normalize(d.doc.text)).size();
    CHECK_GE(n, cfg.min_length);
    CHECK_LE(n, cfg.max_length);
  }
  const auto dist = distribution(a, LabelSchema({"x", "y", "z"}));
  CHECK_EQ(dist.counts, (std::vector<std::size_t>{50, 30, 20}));
  CHECK_EQ(gaussian_bag_corpus(cfg), a);
}

}  // namespace
}  // namespace altc
