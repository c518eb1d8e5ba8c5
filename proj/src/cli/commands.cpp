// Copyright 2026 The segcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <sstream>

#include "segcert/cli.hpp"
#include "segcert/errors.hpp"
#include "segcert/metrics.hpp"

namespace segcert::cli {
namespace {

namespace fs = std::filesystem;

ModelKind parse_model(const std::string& text) {
  if (text == "band") return ModelKind::band;
  if (text == "oracle") return ModelKind::oracle;
  if (text == "constant") return ModelKind::constant;
  throw ConfigError("model.type must be band, oracle or constant, got '" + text + "'");
}

std::string image_name(const Image& image) { return image.channels() == 3 ? "image.ppm" : "image.pgm"; }

// Evaluation against ground truth when there is one; otherwise only the
// abstention rate and radius are meaningful.
metrics::EvalReport score(const smoothing::CertificationResult& result, const std::optional<LabelMap>& truth,
                          int classes) {
  if (truth) return metrics::evaluate(result.labels, *truth, classes, result.radius);
  metrics::EvalReport r;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.acc_strict = r.acc_nonabstain = r.miou = nan;
  r.abstain_rate = static_cast<double>(result.abstentions()) / static_cast<double>(result.labels.size());
  r.radius = result.radius;
  return r;
}

metrics::CsvRow csv_row(const RunConfig& run, const smoothing::SmoothingConfig& cfg, metrics::EvalReport report) {
  metrics::CsvRow row;
  row.sigma = cfg.sigma;
  row.report = std::move(report);
  row.n = cfg.n;
  row.n0 = cfg.n0;
  row.alpha = cfg.significance.alpha;
  row.tau = cfg.significance.tau;
  row.denoise_mode = std::string(smoothing::to_string(cfg.effective_denoising()));
  row.model = std::string(to_string(run.model));
  row.seed = cfg.seed;
  return row;
}

struct Engine {
  diffusion::DiffusionSchedule schedule;
  std::unique_ptr<diffusion::MixtureDenoiser> denoiser;

  explicit Engine(const RunConfig& run)
      : schedule(diffusion::DiffusionSchedule::linear(run.schedule)),
        denoiser(std::make_unique<diffusion::MixtureDenoiser>(
            diffusion::Mixture::uniform(run.model_means, run.model_std), run.pool_radius)) {}

  smoothing::DenoisingBackend backend() const { return {denoiser.get(), &schedule}; }
};

std::string run_log(const smoothing::CertificationResult& r, const models::SegmentationModel& model) {
  std::ostringstream log;
  log << "model = " << model.name() << "\n"
      << "sigma = " << format_double(r.config.sigma) << "\n"
      << "denoise_mode = " << smoothing::to_string(r.config.effective_denoising()) << "\n"
      << "t_star = " << r.t_star << "\n"
      << "draws = " << r.counts0.draws() + r.counts.draws() << "\n"
      << "denoiser_calls = " << r.denoiser_calls << "\n"
      << "denoiser_calls_per_draw = " << format_double(r.denoiser_calls_per_draw()) << "\n"
      << "pixels = " << r.labels.size() << "\n"
      << "abstentions = " << r.abstentions() << "\n"
      << "radius = " << format_double(r.radius) << "\n";
  return log.str();
}

template <typename Fn>
void with_context(const std::string& context, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(context + ": " + e.what());
  } catch (const RangeError& e) {
    throw RangeError(context + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::band:
      return "band";
    case ModelKind::oracle:
      return "oracle";
    case ModelKind::constant:
      return "constant";
  }
  return "band";
}

RunConfig RunConfig::resolve(const KeyValueConfig& c) {
  RunConfig r;
  const std::uint64_t seed = c.get_u64("seed", 0);

  auto& s = r.scene;
  s.height = c.get_int("scene.height", s.height);
  s.width = c.get_int("scene.width", s.width);
  s.classes = c.get_int("scene.classes", s.classes);
  s.layout = data::parse_layout(c.get_string("scene.layout", std::string(data::to_string(s.layout))));
  s.gap = c.get_double("scene.gap", s.gap);
  s.means = c.get_doubles("scene.means", {});
  s.component_std = c.get_double("scene.std", s.component_std);
  s.channels = c.get_int("scene.channels", s.channels);
  s.cell = c.get_int("scene.cell", s.cell);
  s.seed = c.get_u64("scene.seed", seed);

  auto& m = r.smoothing;
  m.sigma = c.get_double("smoothing.sigma", m.sigma);
  m.n0 = c.get_int("smoothing.n0", m.n0);
  m.n = c.get_int("smoothing.n", m.n);
  m.significance.alpha = c.get_double("smoothing.alpha", m.significance.alpha);
  m.significance.tau = c.get_double("smoothing.tau", m.significance.tau);
  m.denoising = smoothing::parse_denoise_mode(c.get_string("smoothing.denoise", "off"));
  m.seed = c.get_u64("smoothing.seed", seed);
  m.threads = c.get_int("smoothing.threads", m.threads);
  m.scale = c.get_double("smoothing.scale", m.scale);

  r.schedule.steps = c.get_int("diffusion.T", r.schedule.steps);
  r.schedule.beta_start = c.get_double("diffusion.beta_start", r.schedule.beta_start);
  r.schedule.beta_end = c.get_double("diffusion.beta_end", r.schedule.beta_end);

  r.model = parse_model(c.get_string("model.type", "band"));
  r.model_means = c.get_doubles("model.means", s.class_means());
  r.model_std = c.get_double("model.std", s.component_std);
  const int default_classes = r.model == ModelKind::band ? static_cast<int>(r.model_means.size()) : s.classes;
  r.model_classes = c.get_int("model.classes", default_classes);
  if (r.model == ModelKind::constant) {
    const int label = c.get_int("model.label", 0);
    if (label < 0 || label >= r.model_classes) throw ConfigError("model.label must lie in [0, model.classes)");
    r.constant_label = static_cast<Label>(label);
  }
  if (r.model == ModelKind::oracle) {
    r.oracle_p_true = c.get_double("model.p_true", r.oracle_p_true);
    r.oracle_seed = c.get_u64("model.seed", seed);
  }
  r.pool_radius = c.get_int("denoiser.pool_radius", r.pool_radius);
  if (r.pool_radius < 0) throw ConfigError("denoiser.pool_radius must be non-negative");

  r.input_image = c.get_string("input.image", "");
  r.input_labels = c.get_string("input.labels", "");
  m.classes = r.model_classes;
  return r;
}

RunInput load_input(const RunConfig& run) {
  if (run.input_image.empty()) {
    auto scene = data::gen_scene(run.scene);
    return {std::move(scene.image), std::move(scene.labels)};
  }
  RunInput input{data::read_pnm(run.input_image), std::nullopt};
  if (!run.input_labels.empty()) {
    input.truth = data::read_labels(run.input_labels, run.model_classes);
    if (!input.truth->congruent(input.image)) {
      throw DomainError("input.labels and input.image have different sizes");
    }
  }
  return input;
}

std::unique_ptr<models::SegmentationModel> make_model(const RunConfig& run, const RunInput& input) {
  switch (run.model) {
    case ModelKind::band:
      return std::make_unique<models::BandSegmenter>(run.model_means, run.model_std);
    case ModelKind::constant:
      return std::make_unique<models::ConstantModel>(run.constant_label, run.model_classes);
    case ModelKind::oracle:
      if (!input.truth) throw ConfigError("model.type = oracle needs ground truth (input.labels or a generated scene)");
      return std::make_unique<models::OracleChannelModel>(
          models::OracleChannelSpec::uniform(*input.truth, run.model_classes, run.oracle_p_true), run.oracle_seed);
  }
  throw ConfigError("unknown model");
}

Image pvalue_map(const std::vector<double>& pvalues, int height, int width) {
  if (pvalues.size() != static_cast<std::size_t>(height) * width) {
    throw DomainError("pvalue_map: size does not match the image");
  }
  Image out(height, width, 1);
  auto values = out.values();
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    const double pv = pvalues[i];
    double level = pv > 0.0 ? std::round(-std::log10(std::min(pv, 1.0)) * 1000.0) : 65535.0;
    level = std::min(std::max(level, 0.0), 65535.0);
    values[i] = level / 65535.0;
  }
  return out;
}

void cmd_gen(const KeyValueConfig& config, const fs::path& out, std::ostream& log) {
  config.require_int("scene.height");
  config.require_int("scene.width");
  config.require_int("scene.classes");
  const RunConfig run = RunConfig::resolve(config);
  const auto scene = data::gen_scene(run.scene);
  const std::string name = image_name(scene.image);
  data::write_pnm(out / name, scene.image);
  data::write_labels(out / "labels.pgm", scene.labels, run.scene.classes);
  std::string manifest = "# generated scene\n# image = " + name + "\n# labels = labels.pgm\n";
  manifest += "# min_gap = " + format_double(run.scene.min_gap()) + "\n";
  data::write_file(out / "manifest.txt", manifest + config.echo());
  data::write_file(out / "config.txt", config.echo());
  log << "wrote " << (out / name).string() << " and " << (out / "labels.pgm").string() << "\n";
}

void cmd_certify(const KeyValueConfig& config, const fs::path& out, std::ostream& log) {
  const RunConfig run = RunConfig::resolve(config);
  const RunInput input = load_input(run);
  const auto model = make_model(run, input);
  const Engine engine(run);
  const auto result = smoothing::seg_certify(*model, engine.backend(), input.image, run.smoothing);

  const auto report = score(result, input.truth, model->num_classes());
  data::write_labels(out / "certified.pgm", result.labels, model->num_classes());
  data::write_pnm(out / "pvalues.pgm", pvalue_map(result.pvalues, result.labels.height(), result.labels.width()));
  data::write_file(out / "metrics.csv",
                   metrics::csv_header() + "\n" + metrics::csv_line(csv_row(run, result.config, report)) + "\n");
  data::write_file(out / "config.txt", config.echo());
  const std::string text = "command = certify\n" + run_log(result, *model);
  data::write_file(out / "run.log", text);
  log << text;
}

void cmd_sweep(const KeyValueConfig& config, const fs::path& out, std::ostream& log) {
  const RunConfig run = RunConfig::resolve(config);
  const auto sigmas = config.get_doubles("sweep.sigmas", {});
  if (sigmas.empty()) throw ConfigError("sweep.sigmas must list at least one sigma");
  const auto modes =
      config.get_strings("sweep.modes", {std::string(smoothing::to_string(run.smoothing.denoising))});
  const auto scales = config.get_doubles("sweep.scales", {run.smoothing.scale});
  if (modes.empty() || scales.empty()) throw ConfigError("sweep.modes and sweep.scales must not be empty");

  const RunInput input = load_input(run);
  const auto model = make_model(run, input);
  const Engine engine(run);
  std::string full_log;
  for (double scale : scales) {
    std::string csv = metrics::csv_header() + "\n";
    for (const auto& mode_text : modes) {
      const auto mode = smoothing::parse_denoise_mode(mode_text);
      for (double sigma : sigmas) {
        smoothing::SmoothingConfig cfg = run.smoothing;
        cfg.sigma = sigma;
        cfg.denoising = mode;
        cfg.scale = scale;
        with_context("sweep at sigma=" + format_double(sigma) + " scale=" + format_double(scale), [&] {
          engine.denoiser->reset_calls();
          const auto result = smoothing::seg_certify(*model, engine.backend(), input.image, cfg);
          csv += metrics::csv_line(csv_row(run, cfg, score(result, input.truth, model->num_classes()))) + "\n";
          full_log += "scale = " + format_double(scale) + "\n" + run_log(result, *model) + "\n";
        });
      }
    }
    const std::string file = scales.size() == 1 ? "metrics.csv" : "metrics_scale_" + format_double(scale) + ".csv";
    data::write_file(out / file, csv);
    log << csv;
  }
  data::write_file(out / "config.txt", config.echo());
  data::write_file(out / "run.log", "command = sweep\n" + full_log);
}

void cmd_eval(const KeyValueConfig& config, const fs::path& out, std::ostream& log) {
  const std::string pred_path = config.require_string("eval.pred");
  const std::string gt_path = config.require_string("eval.gt");
  const RunConfig run = RunConfig::resolve(config);
  const int classes = config.get_int("eval.classes", run.model_classes);
  const LabelMap pred = data::read_labels(pred_path, classes);
  const LabelMap gt = data::read_labels(gt_path, classes);
  const double sigma = run.smoothing.sigma;
  const double radius = sigma > 0.0 ? stats::certified_radius(sigma, run.smoothing.significance.tau) : 0.0;
  const auto report = metrics::evaluate(pred, gt, classes, radius);
  const std::string csv = metrics::csv_header() + "\n" + metrics::csv_line(csv_row(run, run.smoothing, report)) + "\n";
  data::write_file(out / "eval.csv", csv);
  data::write_file(out / "config.txt", config.echo());
  log << csv;
}

void cmd_render(const KeyValueConfig& config, const fs::path& out, std::ostream& log) {
  const std::string labels_path = config.require_string("render.labels");
  const int classes = config.get_int("render.classes", config.get_int("scene.classes", 4));
  const std::string target = config.get_string("render.output", (out / "render.ppm").string());
  const LabelMap labels = data::read_labels(labels_path, classes);
  data::write_pnm(target, data::render_segmentation(labels, data::default_palette(classes)), 255);
  log << "wrote " << target << "\n";
}

void cmd_timestep(const KeyValueConfig& config, std::ostream& log) {
  if (!config.has("smoothing.sigma")) throw ConfigError("missing required config key 'smoothing.sigma' (--sigma)");
  const RunConfig run = RunConfig::resolve(config);
  const auto schedule = diffusion::DiffusionSchedule::linear(run.schedule);
  const auto step = diffusion::compute_timestep(schedule, run.smoothing.sigma);
  log << step.t_star << "\n";
}

void cmd_fwer_sim(const KeyValueConfig& config, const fs::path& out, std::ostream& log) {
  verification::FwerRunSpec spec;
  const std::uint64_t seed = config.get_u64("seed", 0);
  spec.pixels = config.get_int("fwer.pixels", spec.pixels);
  spec.n = config.get_int("fwer.n", spec.n);
  spec.n0 = config.get_int("fwer.n0", spec.n0);
  spec.tau = config.get_double("fwer.tau", spec.tau);
  spec.alpha = config.get_double("fwer.alpha", spec.alpha);
  spec.p_true = config.get_double("fwer.p_true", spec.p_true);
  spec.trials = config.get_int("fwer.trials", spec.trials);
  spec.classes = config.get_int("fwer.classes", spec.classes);
  spec.threads = config.get_int("fwer.threads", spec.threads);
  spec.seed = config.get_u64("fwer.seed", seed);
  const auto report = verification::fwer_simulate(spec);

  std::string csv = verification::fwer_csv_header() + "\n";
  for (const auto& t : report.trials) csv += verification::fwer_csv_line(t) + "\n";
  data::write_file(out / "fwer.csv", csv);
  std::ostringstream summary;
  summary << "trials = " << spec.trials << "\n"
          << "errors = " << report.errors << "\n"
          << "fwer = " << format_double(report.fwer) << "\n"
          << "standard_error = " << format_double(report.standard_error) << "\n"
          << "tolerance = " << format_double(report.tolerance()) << "\n"
          << "within_tolerance = " << (report.fwer <= report.tolerance() ? "yes" : "no") << "\n";
  data::write_file(out / "summary.txt", summary.str());
  data::write_file(out / "config.txt", config.echo());
  log << summary.str();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const ParseError*>(&e)) return 3;
  if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const RangeError*>(&e)) return 4;
  if (dynamic_cast<const std::domain_error*>(&e) || dynamic_cast<const std::out_of_range*>(&e)) return 4;
  return 1;
}

}  // namespace segcert::cli
