#include <doctest.h>

#include <cmath>

#include "mbg/container.hpp"
#include "mbg/util.hpp"

#include "testsupport.hpp"

using namespace mbg;
using testsupport::TempDir;

namespace {

struct SmallDataset {
  TempDir dir{"container"};
  DatasetManifest manifest;
  LpConfig lp;
  F0Config f0;
  SurrogateConfig surrogate;

  SmallDataset() {
    CorpusSpec spec;
    spec.n_utterances = 5;
    spec.dur_min_s = 0.3;
    spec.dur_max_s = 0.5;
    spec.n_valid = 1;
    spec.n_test = 1;
    manifest = synth_corpus(spec, 13, dir.str());
    lp.order = 12;
    surrogate.seed = 29;
  }
};

}  // namespace

TEST_CASE("container: build populates every dataflow field") {
  SmallDataset ds;
  const FeatureContainer c =
      build_features(ds.manifest, ds.dir.str(), ds.lp, ds.f0, ds.surrogate);
  CHECK(c.sample_rate == 16000);
  CHECK(c.cond_dim == ds.lp.order + 3);
  REQUIRE(c.utts.size() == 5);

  // every stored edge of the preparation flow, one field each:
  for (const auto& u : c.utts) {
    const std::size_t nf = u.grid.n_frames;
    CHECK(u.n_samples > 0);                        // source waveform ref
    CHECK(u.gt_coeff.n_frames() == nf);            // LP analysis
    CHECK(u.gt_lsf.n_frames() == nf);              // spectral parameterization
    CHECK(u.gen_lsf.n_frames() == nf);             // front-end generation
    CHECK(u.gen_lsf.source == CoeffSource::generated);
    CHECK(u.gen_coeff.n_frames() == nf);           // generated filter
    CHECK(u.gen_coeff.source == CoeffSource::generated);
    CHECK(u.f0_hz.size() == nf);                   // auxiliary: pitch
    CHECK(u.vuv.size() == nf);                     // auxiliary: voicing
    CHECK(u.energy.size() == nf);                  // auxiliary: energy
    CHECK(u.cond_gt.n_frames == nf);               // conditions (reference)
    CHECK(u.cond_gen.n_frames == nf);              // conditions (deployment)
    CHECK(u.cond_gt.normalized);
    CHECK(u.cond_gen.normalized);
    CHECK(u.exc_plain.raw.size() == u.n_samples);  // reference residual
    CHECK(u.exc_mbg.raw.size() == u.n_samples);    // closed-loop residual
    CHECK(u.exc_plain.symbols.has_value());        // companded targets
    CHECK(u.exc_mbg.symbols.has_value());
    CHECK(u.exc_plain.gain > 0.0);                 // stored inverse gains
    CHECK(u.exc_mbg.gain > 0.0);
    CHECK(u.residual_check < 1e-10);               // decomposition audit
  }
}

TEST_CASE("container: identity surrogate makes both excitations equal") {
  SmallDataset ds;
  ds.surrogate.smooth_frames = 1;
  ds.surrogate.noise_std_rad = 0.0;
  const FeatureContainer c =
      build_features(ds.manifest, ds.dir.str(), ds.lp, ds.f0, ds.surrogate);
  for (const auto& u : c.utts) {
    REQUIRE(u.exc_plain.raw.size() == u.exc_mbg.raw.size());
    // identical up to the LSF<->LPC round trip of the surrogate path
    double worst = 0.0;
    for (std::size_t n = 0; n < u.n_samples; ++n)
      worst = std::max(worst, std::fabs(u.exc_plain.raw[n] * u.exc_plain.gain -
                                        u.exc_mbg.raw[n] * u.exc_mbg.gain));
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("container: serialization round-trips bit-exactly") {
  SmallDataset ds;
  const FeatureContainer c =
      build_features(ds.manifest, ds.dir.str(), ds.lp, ds.f0, ds.surrogate);
  const auto p1 = ds.dir.str("a.mbgf");
  const auto p2 = ds.dir.str("b.mbgf");
  save_container(c, p1);
  const FeatureContainer rd = load_container(p1);
  save_container(rd, p2);
  CHECK(testsupport::read_file_bytes(p1) == testsupport::read_file_bytes(p2));

  // spot-check content equality across the round trip
  REQUIRE(rd.utts.size() == c.utts.size());
  CHECK(rd.stats_gt.mean == c.stats_gt.mean);
  CHECK(rd.stats_gen.stddev == c.stats_gen.stddev);
  for (std::size_t i = 0; i < c.utts.size(); ++i) {
    CHECK(rd.utts[i].id == c.utts[i].id);
    CHECK(rd.utts[i].split == c.utts[i].split);
    CHECK(*rd.utts[i].exc_plain.symbols == *c.utts[i].exc_plain.symbols);
    CHECK(rd.utts[i].exc_mbg.gain == c.utts[i].exc_mbg.gain);
    CHECK(rd.utts[i].grid.shift == c.utts[i].grid.shift);
  }
}

TEST_CASE("container: build is deterministic") {
  SmallDataset ds;
  const FeatureContainer a =
      build_features(ds.manifest, ds.dir.str(), ds.lp, ds.f0, ds.surrogate);
  const FeatureContainer b =
      build_features(ds.manifest, ds.dir.str(), ds.lp, ds.f0, ds.surrogate);
  const auto p1 = ds.dir.str("d1.mbgf");
  const auto p2 = ds.dir.str("d2.mbgf");
  save_container(a, p1);
  save_container(b, p2);
  CHECK(testsupport::read_file_bytes(p1) == testsupport::read_file_bytes(p2));
}

TEST_CASE("container: errors carry the utterance id") {
  SmallDataset ds;
  ds.manifest.entries[2].source = "wav/missing.wav";
  CHECK_THROWS_WITH_AS(
      build_features(ds.manifest, ds.dir.str(), ds.lp, ds.f0, ds.surrogate),
      doctest::Contains(ds.manifest.entries[2].id.c_str()), Error);
}

TEST_CASE("container: split helpers") {
  SmallDataset ds;
  const FeatureContainer c =
      build_features(ds.manifest, ds.dir.str(), ds.lp, ds.f0, ds.surrogate);
  CHECK(c.split_indices("train").size() == 3);
  CHECK(c.split_indices("valid").size() == 1);
  CHECK(c.split_indices("test").size() == 1);
  CHECK(c.by_id("utt0000").id == "utt0000");
  CHECK_THROWS_AS(c.by_id("nope"), Error);
}
