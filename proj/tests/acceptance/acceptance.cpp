// Acceptance harness: one PASS/FAIL line per criterion.
//
//   isb_acceptance [name-substring ...]
//
// Exits nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"
#include "isb/evaluation.hpp"
#include "isb/flow_store.hpp"
#include "isb/image_io.hpp"
#include "isb/run_config.hpp"
#include "oracles.hpp"

using namespace isb;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

struct Criterion {
  std::string name;
  double budget_s;
  std::function<void(Outcome&)> run;
};

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::vector<const TrainingSample*> single(const TrainingSample& s) { return {&s}; }

Trainer make_trainer(const TrainConfig& train) {
  return Trainer(GeneratorConfig::tiny(), DiscriminatorConfig::tiny(), FeatureExtractorConfig::tiny(), train);
}

TrainConfig train_config(AblationMode mode, double lr, std::int64_t steps, std::uint64_t seed = 42) {
  TrainConfig c;
  c.learning_rate = lr;
  c.ablation_mode = mode;
  c.max_steps = steps;
  c.seed = seed;
  c.checkpoint_every = 0;
  c.log_wall_time = false;
  return c;
}

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  if (code != 0) {
    std::cerr << "isb";
    for (const auto& a : args) std::cerr << ' ' << a;
    std::cerr << " -> " << code << '\n' << e.str();
  }
  return code;
}

// ---- loss oracles ------------------------------------------------------------

void loss_oracles(Outcome& o) {
  Rng rng(101);
  const FeatureExtractor fx(FeatureExtractorConfig::tiny());
  double worst[6] = {0, 0, 0, 0, 0, 0};
  for (int i = 0; i < 100; ++i) {
    const std::size_t h = 2 + rng.below(6), w = 2 + rng.below(6);
    const nn::Tensor a = oracle::random_tensor({3, h, w}, rng), b = oracle::random_tensor({3, h, w}, rng);
    worst[0] = std::max(worst[0], std::abs(mse_loss(a, b) - oracle::mse(a, b)));
    worst[1] = std::max(worst[1], std::abs(tv_loss(a) - oracle::tv(a)));
    const nn::Tensor pa = oracle::random_tensor({3, 8, 8}, rng), pb = oracle::random_tensor({3, 8, 8}, rng);
    worst[2] = std::max(worst[2], std::abs(perceptual_loss(pa, pb, fx) - oracle::perceptual(fx, pa, pb)));
    const double p = rng.uniform(kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
    worst[3] = std::max(worst[3], std::abs(adversarial_loss(p) - (-std::log(p))));
    const double dh = rng.uniform(0.0, 1.0), ds = rng.uniform(0.0, 1.0);
    worst[4] = std::max(worst[4], std::abs(discriminator_loss(dh, ds) - (1.0 - dh + ds)));
    std::vector<double> frames(1 + rng.below(12));
    long double sum = 0;
    for (double& f : frames) sum += (f = rng.uniform(0.0, 5.0));
    worst[5] = std::max(worst[5], std::abs(sequence_loss(frames) - static_cast<double>(sum / frames.size())));
  }
  const char* names[6] = {"mse", "tv", "perceptual", "adversarial", "discriminator", "sequence"};
  for (int k = 0; k < 6; ++k) {
    o.detail << names[k] << " " << fmt(worst[k], 2) << " ";
    o.require(worst[k] <= 1e-9, std::string(names[k]) + " > 1e-9");
  }
}

// ---- weighted-sum identity -----------------------------------------------------

void weighted_sum(Outcome& o) {
  Rng rng(102);
  const LossWeights w;
  o.require(w == LossWeights{1.0, 6e-3, 1e-3, 2e-8}, "default weights");
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    LossBreakdown c;
    c.mse = rng.uniform(0, 10);
    c.perceptual = rng.uniform(0, 100);
    c.adversarial = rng.uniform(0, 20);
    c.tv = rng.uniform(0, 1e4);
    const LossBreakdown t = compose(c, w);
    const double expect = 1.0 * c.mse + 6e-3 * c.perceptual + 1e-3 * c.adversarial + 2e-8 * c.tv;
    worst = std::max(worst, std::abs(t.total - expect) / std::max(std::abs(expect), 1e-300));
  }
  o.detail << "max relative error " << fmt(worst, 2) << " over 10000 draws";
  o.require(worst <= 1e-9, "relative error > 1e-9");
}

// ---- gradient checks -------------------------------------------------------------

constexpr double kFdStep = 1e-6;
constexpr double kGradFloor = 1e-6;

double relative_error(double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), kGradFloor}); }

// Checks d objective / d param at up to `per_tensor` entries of each parameter
// (all entries when per_tensor is 0). The generator is piecewise linear in its
// activations, so a central difference can straddle a PReLU kink; an entry
// that is not tight at kFdStep is re-probed with 10x and 100x smaller steps, which a
// kink straddle cannot survive but a wrong gradient fails at every step.
struct ParamCheck {
  double worst = 0;
  std::size_t checked = 0;
  std::size_t reprobed = 0;
};

ParamCheck check_parameters(const nn::ParameterList& params, const std::function<nn::Var()>& objective,
                            std::size_t per_tensor, Rng& rng) {
  nn::zero_grads(params);
  nn::backward(objective());
  ParamCheck out;
  for (const auto& p : params) {
    const nn::Tensor analytic = p.var.grad();
    nn::Var var = p.var;
    std::vector<std::size_t> idx(var.value().size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (per_tensor && idx.size() > per_tensor) {
      for (std::size_t i = 0; i < per_tensor; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
      idx.resize(per_tensor);
    }
    for (std::size_t i : idx) {
      double& v = var.mutable_value()[i];
      const double saved = v;
      nn::NoGradGuard guard;
      double err = INFINITY;
      for (double h : {kFdStep, kFdStep / 10, kFdStep / 100}) {
        v = saved + h;
        const double up = objective().item();
        v = saved - h;
        const double down = objective().item();
        v = saved;
        err = std::min(err, relative_error(analytic[i], (up - down) / (2 * h)));
        if (err < 1e-5) break;
        if (h == kFdStep) ++out.reprobed;
      }
      out.worst = std::max(out.worst, err);
      ++out.checked;
    }
  }
  return out;
}

double check_input(const std::function<nn::Var(const nn::Var&)>& loss, nn::Tensor x) {
  const nn::Var p = nn::parameter(x);
  nn::backward(loss(p));
  const nn::Tensor analytic = p.grad();
  const nn::Tensor numeric = oracle::numeric_gradient(
      [&] {
        nn::NoGradGuard guard;
        return loss(nn::constant(x)).item();
      },
      x, kFdStep);
  return oracle::max_relative_error(analytic, numeric, kGradFloor);
}

void gradient_checks(Outcome& o) {
  Rng rng(103);
  const auto samples = fixture::toy_samples(0, 2);
  const ClipWindow& window = samples[3].window;  // 8x8 LR
  const Generator g(GeneratorConfig::tiny(), 5);
  const Discriminator d(DiscriminatorConfig::tiny(), 6);
  const FeatureExtractor fx(FeatureExtractorConfig::tiny());

  const nn::Tensor g_weights = oracle::random_tensor({3, 32, 32}, rng, -1.0, 1.0);
  const ParamCheck gc =
      check_parameters(g.parameters(), [&] { return nn::ops::dot(g.forward(window), g_weights); }, 48, rng);

  const nn::Var hr = nn::constant(window.target_hr->to_tensor());
  const nn::Var fake = nn::constant(oracle::random_tensor({3, 32, 32}, rng));
  const ParamCheck dc =
      check_parameters(d.parameters(), [&] { return discriminator_loss(d.probability(hr), d.probability(fake)); }, 0, rng);

  const nn::Tensor sr = oracle::random_tensor({3, 32, 32}, rng);
  const double e_mse = check_input([&](const nn::Var& x) { return mse_loss(x, hr); }, sr);
  const double e_l1 = check_input([&](const nn::Var& x) { return l1_loss(x, hr); }, sr);
  const double e_perc = check_input([&](const nn::Var& x) { return perceptual_loss(x, hr, fx); }, sr);
  const double e_tv = check_input([&](const nn::Var& x) { return tv_loss(x); }, sr);
  const double e_adv = check_input([&](const nn::Var& x) { return adversarial_loss(d.probability(x)); }, sr);

  o.detail << "generator " << fmt(gc.worst, 2) << " (" << gc.checked << " of " << nn::parameter_count(g.parameters())
           << " scalars, every tensor, " << gc.reprobed << " re-probed at a kink), discriminator " << fmt(dc.worst, 2)
           << " (all " << dc.checked << ", " << dc.reprobed << " re-probed), mse "
           << fmt(e_mse, 2) << ", l1 " << fmt(e_l1, 2) << ", perceptual " << fmt(e_perc, 2) << ", tv " << fmt(e_tv, 2)
           << ", adversarial " << fmt(e_adv, 2);
  for (double e : {gc.worst, dc.worst, e_mse, e_l1, e_perc, e_tv, e_adv}) o.require(e < 1e-3, "relative error >= 1e-3");
}

// ---- shape contract ----------------------------------------------------------------

void shape_contract(Outcome& o) {
  Rng rng(104);
  int ok = 0, total = 0;
  for (auto [h, w] : {std::pair{8, 8}, std::pair{32, 32}, std::pair{112, 64}}) {
    for (int n : {1, 2, 6}) {
      GeneratorConfig c = GeneratorConfig::tiny();
      c.n_neighbors = n;
      const Generator g(c, 1);
      ClipWindow win;
      win.target_lr = oracle::random_frame(h, w, rng);
      for (int k = 0; k < n; ++k) {
        win.neighbors_lr.push_back(oracle::random_frame(h, w, rng));
        win.flows.emplace_back(h, w);
      }
      const Frame sr = g.infer(win);
      const bool good = sr.height() == 4 * h && sr.width() == 4 * w && sr.channels() == 3;
      ++total;
      ok += good;
      if (!good) o.require(false, std::to_string(h) + "x" + std::to_string(w) + " n=" + std::to_string(n));
    }
  }
  o.detail << ok << "/" << total << " (H,W,n) combinations give (4H,4W,3)";
}

// ---- overfit ---------------------------------------------------------------------

void overfit(Outcome& o) {
  const auto samples = fixture::toy_samples(0, 2);
  const std::vector<TrainingSample> one{samples[3]};
  Trainer t = make_trainer(train_config(AblationMode::MSE_ONLY, 1e-2, 2000));
  const double bicubic = *evaluate_clip(BicubicModel{}, one).mean_psnr_db;
  const double before = *evaluate_clip(GeneratorModel(t.generator()), one).mean_psnr_db;
  fit(t, one);
  const double after = *evaluate_clip(GeneratorModel(t.generator()), one).mean_psnr_db;
  o.detail << "bicubic " << fmt(bicubic) << " dB, untrained " << fmt(before) << " dB, after " << t.step()
           << " steps " << fmt(after) << " dB (margin " << fmt(after - bicubic, 3) << " dB)";
  o.require(after - bicubic >= 3.0, "margin < 3 dB");
}

// ---- adversarial trainability --------------------------------------------------------

double generator_adv_loss(const Trainer& t, const ClipWindow& w) {
  nn::NoGradGuard guard;
  return adversarial_loss(t.discriminator().probability(t.generator().forward(w))).item();
}

void adversarial(Outcome& o) {
  const auto samples = fixture::toy_samples(0, 2);
  const TrainingSample& s = samples[3];
  Trainer t = make_trainer(train_config(AblationMode::ADV, 1e-3, 0));
  auto probs = [&] {
    nn::NoGradGuard guard;
    const double real = t.discriminator().probability(nn::constant(s.window.target_hr->to_tensor())).item();
    const double fake = t.discriminator().probability(t.generator().forward(s.window)).item();
    return std::pair{real, fake};
  };
  int steps = 0;
  auto [real, fake] = probs();
  while (steps < 500 && !(real > 0.9 && fake < 0.1)) {
    t.discriminator_step(single(s));
    ++steps;
    std::tie(real, fake) = probs();
  }
  o.detail << "D(real) " << fmt(real) << ", D(fake) " << fmt(fake) << " after " << steps << " D steps; ";
  o.require(real > 0.9 && fake < 0.1, "discriminator did not separate within 500 steps");

  const TensorMap d_before = export_parameters(t.discriminator().parameters());
  const double before = generator_adv_loss(t, s.window);
  t.generator_step(single(s));
  const double after = generator_adv_loss(t, s.window);
  o.detail << "-log D(G(LR)) " << fmt(before, 6) << " -> " << fmt(after, 6);
  o.require(after < before, "generator update did not decrease -log D(G(LR))");
  o.require(export_parameters(t.discriminator().parameters()) == d_before, "generator step touched D");
}

// ---- ablation lattice -------------------------------------------------------------------

bool logs_match_modes(const fs::path& dir, Outcome& o) {
  bool ok = true;
  for (AblationMode m : kAllAblationModes) {
    const ActiveLosses a = active_losses(m);
    std::istringstream lines(fixture::read_file(dir / (std::string(to_string(m)) + ".jsonl")));
    int count = 0;
    for (std::string line; std::getline(lines, line);) {
      const json j = json::parse(line);
      ++count;
      const std::pair<const char*, bool> fields[] = {{"l1", a.l1},
                                                      {"mse", a.mse},
                                                      {"perceptual", a.perceptual},
                                                      {"adversarial", a.adversarial},
                                                      {"tv", a.tv},
                                                      {"d_loss", trains_discriminator(m)}};
      for (const auto& [key, on] : fields) {
        const double v = j.at(key).get<double>();
        if (on ? !(v > 0.0 && std::isfinite(v)) : v != 0.0) {
          ok = false;
          o.require(false, std::string(to_string(m)) + " step " + std::to_string(j.at("step").get<int>()) + " " + key);
        }
      }
    }
    if (count != 50) {
      ok = false;
      o.require(false, std::string(to_string(m)) + " logged " + std::to_string(count) + " steps");
    }
  }
  return ok;
}

void ablation_lattice(Outcome& o) {
  fixture::TempDir dir("ablation");
  std::vector<TrainingSample> train, held = fixture::toy_samples(2, 2);
  for (int c = 0; c < 2; ++c)
    for (auto& s : fixture::toy_samples(c, 2)) train.push_back(std::move(s));
  const std::vector<AblationMode> modes(kAllAblationModes.begin(), kAllAblationModes.end());

  AblationOptions opts;
  opts.train.seed = 7;
  opts.train.log_wall_time = false;
  opts.log_dir = dir / "a";
  const AblationReport first = ablation_report(modes, train, held, 50, opts);
  opts.log_dir = dir / "b";
  const AblationReport second = ablation_report(modes, train, held, 50, opts);

  const bool logs_ok = logs_match_modes(dir / "a", o);
  const bool same = fixture::snapshot_tree(dir / "a") == fixture::snapshot_tree(dir / "b") &&
                    json(first).dump() == json(second).dump() && render_table(first) == render_table(second);
  o.require(first.rows.size() == 6, "expected six rows");
  o.require(same, "rerun differs");
  o.detail << first.rows.size() << " modes x 50 steps, components " << (logs_ok ? "exact" : "wrong") << ", rerun "
           << (same ? "byte-identical" : "differs") << "; PSNR";
  for (const auto& r : first.rows) o.detail << " " << to_string(r.mode) << "=" << (r.psnr_db ? fmt(*r.psnr_db) : "inf");
}

// ---- metric oracles ---------------------------------------------------------------------

void metric_oracles(Outcome& o) {
  const Frame base(16, 16, 3, 100.0 / 255.0);
  Frame one = base, sixteen = base;
  for (double& v : one.pixels()) v += 1.0 / 255.0;
  for (double& v : sixteen.pixels()) v += 16.0 / 255.0;
  const double p1 = psnr(base, one), p16 = psnr(base, sixteen);
  o.require(std::abs(p1 - 48.13) <= 0.01, "1/255 offset");
  o.require(std::abs(p16 - 24.05) <= 0.01, "16/255 offset");

  Rng rng(108);
  double worst_self = 0;
  for (int i = 0; i < 20; ++i) {
    const Frame a = oracle::random_frame(16 + i, 20, rng);
    worst_self = std::max(worst_self, std::abs(ssim(a, a) - 1.0));
  }
  o.require(worst_self <= 1e-9, "SSIM(a,a) != 1");

  const Frame img = quantized8(oracle::random_frame(32, 32, rng, 0.2, 0.8));
  std::vector<double> signs;
  for (std::size_t i = 0; i < img.pixels().size(); ++i) signs.push_back(rng.uniform() < 0.5 ? -1.0 : 1.0);
  std::vector<double> curve;
  for (int amp : {1, 2, 4, 8}) {
    Frame noisy = img;
    for (std::size_t i = 0; i < signs.size(); ++i) noisy.pixels()[i] += signs[i] * amp / 255.0;
    curve.push_back(psnr(img, noisy));
  }
  const bool monotone = curve[0] > curve[1] && curve[1] > curve[2] && curve[2] > curve[3];
  o.require(monotone, "PSNR not monotone in noise amplitude");
  o.detail << "PSNR " << fmt(p1, 6) << " / " << fmt(p16, 6) << " dB, max |SSIM(a,a)-1| " << fmt(worst_self, 2)
           << ", noise {1,2,4,8}/255 ->";
  for (double c : curve) o.detail << " " << fmt(c);
}

// ---- flow sanity ---------------------------------------------------------------------------

void flow_sanity(Outcome& o) {
  const int size = 48, border = 6;
  const Frame source = fixture::texture(size, size);
  const Frame target = fixture::texture(size, size, 2.0, 0.0);  // content moved 2 px
  const FlowMap flow = estimate_flow(source, target);
  double mean_u = 0, mean_abs_v = 0, epe = 0;
  int n = 0;
  for (int y = border; y < size - border; ++y)
    for (int x = border; x < size - border; ++x) {
      mean_u += flow.u_at(y, x);
      mean_abs_v += std::abs(flow.v_at(y, x));
      epe += std::hypot(flow.u_at(y, x) - 2.0, flow.v_at(y, x));
      ++n;
    }
  mean_u /= n;
  mean_abs_v /= n;
  epe /= n;
  o.require(std::abs(mean_u - 2.0) < 0.25, "mean u outside 2 +- 0.25");
  o.require(mean_abs_v < 0.25, "mean |v| >= 0.25");

  Rng rng(109);
  double worst_static = 0;
  for (const Frame& f : {source, oracle::random_frame(32, 32, rng), make_toy_corpus(1, 1, 32, 32)[0].frames[0]})
    worst_static = std::max(worst_static, mean_flow_magnitude(estimate_flow(f, f)));
  o.require(worst_static < 0.05, "zero-motion flow >= 0.05 px");
  o.detail << "2 px shift: interior mean u " << fmt(mean_u) << ", mean |v| " << fmt(mean_abs_v) << ", mean EPE "
           << fmt(epe) << "; zero motion max " << fmt(worst_static, 2) << " px";
}

// ---- determinism and persistence -------------------------------------------------------------

void determinism(Outcome& o) {
  fixture::TempDir dir("determinism");
  const auto samples = fixture::toy_samples(1, 2);

  std::string logs[2];
  CheckpointBundle ends[2];
  for (int r = 0; r < 2; ++r) {
    Trainer t = make_trainer(train_config(AblationMode::FULL, 1e-3, 50));
    std::ostringstream log;
    ends[r] = fit(t, samples, {{}, &log, {}});
    logs[r] = log.str();
  }
  const bool same_runs = logs[0] == logs[1] && ends[0] == ends[1];
  o.require(same_runs, "same-seed runs differ");

  TrainConfig c = train_config(AblationMode::FULL, 1e-3, 200);
  c.checkpoint_every = 100;
  Trainer straight = make_trainer(c);
  const CheckpointBundle full = fit(straight, samples, {dir / "ckpt", nullptr, {}});
  Trainer resumed = make_trainer(c);
  resumed.restore(load_checkpoint(checkpoint_path(dir / "ckpt", 100)));
  const CheckpointBundle cont = fit(resumed, samples);
  const bool resume_ok = resumed.step() == 200 && cont == full;
  o.require(resume_ok, "resume at 100 differs from the uninterrupted run at 200");
  save_checkpoint(cont, dir / "again.isbc");
  const bool bytes_ok = fixture::read_file(dir / "again.isbc") == fixture::read_file(dir / "ckpt" / "latest.isbc");
  o.require(bytes_ok, "re-saved checkpoint differs byte-wise");

  const std::string data = (dir / "data").string(), corpus = (dir / "corpus").string();
  std::string first, second;
  o.require(run_cli({"toy", "--out", data, "--clips", "2", "--frames", "5"}) == 0, "toy");
  o.require(run_cli({"prepare", "--data-root", data, "--out", corpus}, &first) == 0, "prepare");
  const auto tree = fixture::snapshot_tree(corpus);
  o.require(run_cli({"prepare", "--data-root", data, "--out", corpus}, &second) == 0, "prepare again");
  const json rerun = json::parse(second);
  const bool idempotent = fixture::snapshot_tree(corpus) == tree && rerun.at("frames_written") == 0 &&
                          rerun.at("flows_written") == 0 && rerun.at("split_written") == false;
  o.require(idempotent, "prepare rerun changed the corpus");
  o.detail << "same-seed runs " << (same_runs ? "identical" : "differ") << ", resume@100->200 "
           << (resume_ok ? "identical" : "differs") << ", checkpoint bytes " << (bytes_ok ? "stable" : "differ")
           << ", prepare rerun " << (idempotent ? "no-op" : "changed files") << " (" << tree.size() << " files)";
}

// ---- end to end ---------------------------------------------------------------------------------

void end_to_end(Outcome& o) {
  fixture::TempDir dir("e2e");
  const std::string data = (dir / "data").string(), corpus = (dir / "corpus").string(),
                    ckpt = (dir / "ckpt").string(), sr = (dir / "sr").string();
  o.require(run_cli({"toy", "--out", data}) == 0, "toy");
  o.require(run_cli({"prepare", "--data-root", data, "--out", corpus}) == 0, "prepare");
  o.require(run_cli({"train", "--profile", "tiny", "--corpus", corpus, "--checkpoint-dir", ckpt, "--max-steps", "100",
                     "--lr", "1e-3"}) == 0,
            "train");
  if (!o.pass) return;

  const CorpusLayout layout{corpus, {}};
  const DatasetSplit split = read_split_manifest(layout.split_path());
  const std::string clip = !split.test.empty() ? split.test.front() : !split.val.empty() ? split.val.front() : split.train.back();
  const std::string checkpoint = (fs::path(ckpt) / "latest.isbc").string();
  o.require(run_cli({"upscale", "--input", layout.lr_dir(clip).string(), "--checkpoint", checkpoint, "--out", sr,
                     "--no-video"}) == 0,
            "upscale");
  std::string report_text;
  o.require(run_cli({"evaluate", "--sr", sr, "--hr", layout.hr_dir(clip).string()}, &report_text) == 0, "evaluate");
  if (!o.pass) return;
  const MetricReport file_report = json::parse(report_text).get<MetricReport>();

  const CheckpointBundle bundle = load_checkpoint(checkpoint);
  Generator g(bundle.configs.at("generator").get<GeneratorConfig>(), 0);
  import_parameters(g.parameters(), bundle.generator_params, "generator");
  const auto windows = load_samples(layout, {clip}, g.config().n_neighbors);
  const MetricReport memory = evaluate_clip(GeneratorModel(g), windows);

  // Independent recomputation straight from the PNG files.
  double scalar = 0;
  for (std::size_t t = 0; t < windows.size(); ++t) {
    const Frame a = read_png(fs::path(sr) / frame_file_name(static_cast<int>(t)));
    const Frame b = read_png(layout.hr_dir(clip) / frame_file_name(static_cast<int>(t)));
    scalar += oracle::psnr_luma(a, b);
  }
  scalar /= static_cast<double>(windows.size());

  const bool have = file_report.mean_psnr_db && memory.mean_psnr_db;
  o.require(have, "missing PSNR");
  if (!have) return;
  const double diff = std::abs(*file_report.mean_psnr_db - *memory.mean_psnr_db);
  const double diff_scalar = std::abs(scalar - *memory.mean_psnr_db);
  o.require(file_report.per_frame.size() == windows.size(), "frame count");
  o.require(diff <= 0.05, "file vs memory PSNR > 0.05 dB");
  o.require(diff_scalar <= 0.05, "scalar recomputation vs memory > 0.05 dB");
  o.detail << "clip " << clip << ": file " << fmt(*file_report.mean_psnr_db, 6) << " dB, in-memory "
           << fmt(*memory.mean_psnr_db, 6) << " dB, scalar " << fmt(scalar, 6) << " dB (|diff| " << fmt(diff, 2)
           << "), SSIM " << fmt(memory.mean_ssim);
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"loss_oracles", 10, loss_oracles},
      {"weighted_sum_identity", 1, weighted_sum},
      {"gradient_checks", 120, gradient_checks},
      {"shape_contract", 60, shape_contract},
      {"overfit_sanity", 600, overfit},
      {"adversarial_trainability", 300, adversarial},
      {"ablation_lattice", 900, ablation_lattice},
      {"metric_oracles", 10, metric_oracles},
      {"flow_sanity", 60, flow_sanity},
      {"determinism_persistence", 600, determinism},
      {"end_to_end", 1200, end_to_end},
  };

  std::vector<std::string> filters(argv + 1, argv + argc);
  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!filters.empty() &&
        std::none_of(filters.begin(), filters.end(), [&](const std::string& f) { return c.name.find(f) != std::string::npos; }))
      continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs <= c.budget_s, "runtime over " + fmt(c.budget_s) + " s budget");
    ++ran;
    failed += !o.pass;
    std::printf("%s %-26s %s [%.1f s / %.0f s]\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.str().c_str(), secs,
                c.budget_s);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 && ran > 0 ? 0 : 1;
}
