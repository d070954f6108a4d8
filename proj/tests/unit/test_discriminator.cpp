#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "isb/adam.hpp"
#include "isb/discriminator.hpp"
#include "isb/error.hpp"
#include "isb/losses.hpp"
#include "oracles.hpp"

using namespace isb;

TEST_CASE("probabilities lie strictly inside (0, 1)") {
  Rng rng(1);
  const Discriminator d(DiscriminatorConfig::tiny(), 3);
  for (int i = 0; i < 10; ++i) {
    const double p = d.discriminate(oracle::random_frame(8 + i, 12, rng));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
  // Saturating inputs still respect the epsilon clamp.
  const double hot = d.discriminate(Frame(16, 16, 3, 1e6));
  CHECK(hot >= kProbabilityEpsilon);
  CHECK(hot <= 1.0 - kProbabilityEpsilon);
}

TEST_CASE("discriminator is deterministic in its seed") {
  Rng rng(2);
  const Frame f = oracle::random_frame(16, 16, rng);
  const Discriminator a(DiscriminatorConfig::tiny(), 5), b(DiscriminatorConfig::tiny(), 5), c(DiscriminatorConfig::tiny(), 6);
  CHECK(a.discriminate(f) == b.discriminate(f));
  CHECK(a.discriminate(f) != c.discriminate(f));
}

TEST_CASE("parameter count") {
  const Discriminator d(DiscriminatorConfig::tiny(), 0);
  // convs 3->8 (224) and 8->16 (1168), hidden 16x16+16, output 16+1
  CHECK(DiscriminatorConfig::tiny().parameter_count() == 1681);
  CHECK(nn::parameter_count(d.parameters()) == 1681);
  DiscriminatorConfig c;
  c.channel_schedule = {4, 6, 6};
  c.head_width = 5;
  CHECK(nn::parameter_count(Discriminator(c, 0).parameters()) == c.parameter_count());
}

TEST_CASE("input shape is checked") {
  const Discriminator d(DiscriminatorConfig::tiny(), 0);
  CHECK_THROWS_AS(d.probability(nn::constant(nn::Tensor({1, 8, 8}))), Error);
  DiscriminatorConfig fixed = DiscriminatorConfig::tiny();
  fixed.adaptive_pool = false;
  fixed.input_height = 16;
  fixed.input_width = 16;
  const Discriminator f(fixed, 0);
  CHECK_NOTHROW(f.discriminate(Frame(16, 16, 3)));
  CHECK_THROWS_AS(f.discriminate(Frame(16, 12, 3)), Error);
  DiscriminatorConfig bad = DiscriminatorConfig::tiny();
  bad.leaky_slope = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("discriminator separates a fixed real/fake pair") {
  Rng rng(3);
  Frame real(16, 16, 3), fake(16, 16, 3, 0.5);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      for (int c = 0; c < 3; ++c) real.at(y, x, c) = (x + y) % 2 ? 0.9 : 0.1;
  fake = oracle::random_frame(16, 16, rng, 0.4, 0.6);
  Discriminator d(DiscriminatorConfig::tiny(), 4);
  Adam opt(d.parameters(), AdamParams{1e-2});
  for (int step = 0; step < 300; ++step) {
    opt.zero_grad();
    const nn::Var loss = discriminator_loss(d.probability(nn::constant(real.to_tensor())),
                                            d.probability(nn::constant(fake.to_tensor())));
    nn::backward(loss);
    opt.step();
  }
  CHECK(d.discriminate(real) > 0.9);
  CHECK(d.discriminate(fake) < 0.1);
}

TEST_CASE("config JSON round trip") {
  DiscriminatorConfig c = DiscriminatorConfig::tiny();
  c.head_width = 9;
  nlohmann::json j = c;
  CHECK(j.get<DiscriminatorConfig>() == c);
}
