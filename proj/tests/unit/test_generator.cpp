#include <doctest.h>

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "isb/error.hpp"
#include "isb/generator.hpp"
#include "oracles.hpp"

using namespace isb;

namespace {

ClipWindow random_window(int h, int w, int n, Rng& rng) {
  ClipWindow win;
  win.target_lr = oracle::random_frame(h, w, rng);
  for (int k = 0; k < n; ++k) {
    win.neighbors_lr.push_back(oracle::random_frame(h, w, rng));
    FlowMap f(h, w);
    for (auto& u : f.u) u = rng.uniform(-1.0, 1.0);
    for (auto& v : f.v) v = rng.uniform(-1.0, 1.0);
    win.flows.push_back(f);
  }
  return win;
}

GeneratorConfig tiny_with(int n) {
  GeneratorConfig c = GeneratorConfig::tiny();
  c.n_neighbors = n;
  return c;
}

}  // namespace

TEST_CASE("output is four times the input on each side") {
  Rng rng(1);
  for (auto [h, w] : {std::pair{1, 1}, std::pair{8, 8}, std::pair{5, 11}}) {
    for (int n : {1, 2, 3}) {
      const Generator g(tiny_with(n), 3);
      const nn::Var out = g.forward(random_window(h, w, n, rng));
      CHECK(out.shape() == nn::Shape{3, static_cast<std::size_t>(4 * h), static_cast<std::size_t>(4 * w)});
      CHECK(nn::all_finite(out.value()));
    }
  }
}

TEST_CASE("8x8 stride-4 up and down layers are shape inverses") {
  Rng rng(2);
  const nn::ConvTranspose2d up("up", 2, 2, 8, 4, 2, rng);
  const nn::Conv2d down("down", 2, 2, 8, 4, 2, rng);
  for (std::size_t s : {1u, 3u, 8u}) {
    const nn::Var x = nn::constant(oracle::random_tensor({2, s, s + 1}, rng));
    const nn::Var u = up(x);
    CHECK(u.shape() == nn::Shape{2, 4 * s, 4 * (s + 1)});
    CHECK(down(u).shape() == x.shape());
  }
}

TEST_CASE("parameter count matches the closed form") {
  const Generator g(GeneratorConfig::tiny(), 0);
  CHECK(nn::parameter_count(g.parameters()) == GeneratorConfig::tiny().parameter_count());
  // feat 112+1, sisr 3*(1028)+3, misr 331+1 + 15*289 + 1028+1, projection 1028+1+289+1028+1+1028+1, reconstruct 219
  CHECK(GeneratorConfig::tiny().parameter_count() == 12652);

  GeneratorConfig wide = GeneratorConfig::tiny();
  wide.feat_channels = 6;
  wide.base_channels = 5;
  wide.n_neighbors = 3;
  wide.misr_tiles = 2;
  wide.misr_blocks_per_tile = 1;
  const Generator gw(wide, 0);
  CHECK(nn::parameter_count(gw.parameters()) == wide.parameter_count());
}

TEST_CASE("parameter names are unique") {
  const Generator g(GeneratorConfig::tiny(), 0);
  std::set<std::string> names;
  for (const auto& p : g.parameters()) CHECK(names.insert(p.name).second);
}

TEST_CASE("a residual block with a zeroed second conv is the identity") {
  Rng rng(4);
  nn::ResidualBlock block("r", 3, rng);
  block.second().weight().mutable_value().fill(0.0);
  block.second().bias().mutable_value().fill(0.0);
  const nn::Tensor x = oracle::random_tensor({3, 5, 6}, rng, -1.0, 1.0);
  CHECK(block(nn::constant(x)).value() == x);
}

TEST_CASE("projection step appends one HR map and carries an LR state") {
  Rng rng(5);
  const Generator g(GeneratorConfig::tiny(), 6);
  const nn::Var s = nn::constant(oracle::random_tensor({4, 8, 8}, rng));
  HiddenState state;
  state.lr_state = nn::constant(oracle::random_tensor({4, 2, 2}, rng));
  const HiddenState next = g.projection_step(state, s, s);
  REQUIRE(next.hr_features.size() == 1);
  CHECK(next.lr_state.shape() == nn::Shape{4, 2, 2});
  const HiddenState again = g.projection_step(state, s, s);
  CHECK(again.hr_features[0].value() == next.hr_features[0].value());
  CHECK(next.hr_features[0].shape() == s.shape());
}

TEST_CASE("same seed gives the same network and output") {
  Rng rng(7);
  const ClipWindow win = random_window(6, 6, 2, rng);
  const Generator a(GeneratorConfig::tiny(), 11), b(GeneratorConfig::tiny(), 11), c(GeneratorConfig::tiny(), 12);
  CHECK(a.infer(win) == b.infer(win));
  CHECK_FALSE(a.infer(win) == c.infer(win));
}

TEST_CASE("neighbour count must match the configuration") {
  Rng rng(8);
  const Generator g(GeneratorConfig::tiny(), 1);
  try {
    g.forward(random_window(4, 4, 3, rng));
    FAIL("expected ConfigMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigMismatch);
  }
  ClipWindow bad = random_window(4, 4, 2, rng);
  bad.neighbors_lr[1] = Frame(4, 5, 3);
  CHECK_THROWS_AS(g.forward(bad), Error);
}

TEST_CASE("invalid configurations are rejected") {
  GeneratorConfig c = GeneratorConfig::tiny();
  c.sisr_pad = 3;
  CHECK_THROWS_AS(c.validate(), Error);
  c = GeneratorConfig::tiny();
  c.n_neighbors = 0;
  CHECK_THROWS_AS(Generator(c, 0), Error);
}

TEST_CASE("swapping neighbour order changes the output") {
  Rng rng(9);
  const Generator g(GeneratorConfig::tiny(), 2);
  ClipWindow win = random_window(6, 6, 2, rng);
  const Frame before = g.infer(win);
  std::swap(win.neighbors_lr[0], win.neighbors_lr[1]);
  std::swap(win.flows[0], win.flows[1]);
  CHECK_FALSE(g.infer(win) == before);
}

TEST_CASE("output stays finite on toy data") {
  const Generator g(GeneratorConfig::tiny(), 3);
  for (const auto& s : fixture::toy_samples(0, 2)) {
    const Frame out = g.infer(s.window);
    for (double v : out.pixels()) CHECK(std::isfinite(v));
  }
}

TEST_CASE("config JSON round trip") {
  GeneratorConfig c = GeneratorConfig::tiny();
  c.misr_tiles = 2;
  nlohmann::json j = c;
  CHECK(j.get<GeneratorConfig>() == c);
}
