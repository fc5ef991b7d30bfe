// chipforge: scale-adaptive training-chip mining for detection datasets.
// Subcommands: positive, negative, labels, stats, synth, bench.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "chipforge/bench.hpp"
#include "chipforge/dataset.hpp"
#include "chipforge/errors.hpp"
#include "chipforge/jsonfmt.hpp"
#include "chipforge/kernels.hpp"
#include "chipforge/label_assigner.hpp"
#include "chipforge/logging.hpp"
#include "chipforge/manifest.hpp"
#include "chipforge/parallel.hpp"
#include "chipforge/pipeline.hpp"
#include "chipforge/stats.hpp"
#include "chipforge/synth.hpp"

#include <json.hpp>

namespace cf = chipforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitIo = 2;

struct RunConfig {
  std::string config_path;
  std::string annotations;
  std::string proposals;
  std::string out;
  std::string scales;  // pyramid config path; empty = built-in 3-scale
  std::uint64_t seed = 0;
  int epoch = 0;
  int neg_max = 2;
  int min_proposals = 2;
  bool flip = false;
  int workers = 0;  // 0 = hardware concurrency
  double score_floor = 0.0;
  std::string coverage = "center";
};

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--config", cfg.config_path, "run config JSON; flags override it");
  cmd->add_option("--annotations", cfg.annotations, "COCO-style annotation JSON");
  cmd->add_option("--proposals", cfg.proposals, "proposal JSON Lines");
  cmd->add_option("--out", cfg.out, "output path");
  cmd->add_option("--scales", cfg.scales, "pyramid config JSON path");
  cmd->add_option("--seed", cfg.seed, "RNG seed");
  cmd->add_option("--epoch", cfg.epoch, "epoch for per-epoch sampling");
  cmd->add_option("--neg-max", cfg.neg_max, "negative chips per image per epoch");
  cmd->add_option("--min-proposals", cfg.min_proposals,
                  "minimum residual proposals per negative chip (M)");
  cmd->add_flag("--flip", cfg.flip, "add horizontally flipped twins");
  cmd->add_option("--workers", cfg.workers, "worker threads (0 = all cores)");
}

// Config-file values fill in every flag the command line left untouched.
void merge_config_file(const CLI::App* cmd, RunConfig& cfg) {
  if (cfg.config_path.empty()) return;
  std::ifstream in(cfg.config_path, std::ios::binary);
  if (!in) throw cf::IoError("cannot open config: " + cfg.config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw cf::MalformedInputError(cfg.config_path + ": invalid JSON: " + e.what());
  }
  auto take = [&](const char* flag, const char* key, auto& slot) {
    using T = std::decay_t<decltype(slot)>;
    if (cmd->count(flag) == 0 && j.contains(key)) {
      try {
        slot = j.at(key).get<T>();
      } catch (const nlohmann::json::exception& e) {
        throw cf::MalformedInputError(cfg.config_path + ": key \"" + key + "\": " + e.what());
      }
    }
  };
  take("--annotations", "annotations", cfg.annotations);
  take("--proposals", "proposals", cfg.proposals);
  take("--out", "out", cfg.out);
  take("--scales", "scales", cfg.scales);
  take("--seed", "seed", cfg.seed);
  take("--epoch", "epoch", cfg.epoch);
  take("--neg-max", "neg_max", cfg.neg_max);
  take("--min-proposals", "min_proposals", cfg.min_proposals);
  take("--flip", "flip", cfg.flip);
  take("--workers", "workers", cfg.workers);
  if (j.contains("score_floor")) cfg.score_floor = j.at("score_floor").get<double>();
  if (j.contains("coverage")) cfg.coverage = j.at("coverage").get<std::string>();
}

cf::MineParams mine_params(const RunConfig& cfg) {
  cf::MineParams p;
  p.pyramid = cfg.scales.empty() ? cf::PyramidConfig::default_3scale()
                                 : cf::PyramidConfig::load(cfg.scales);
  p.neg.min_proposals = cfg.min_proposals;
  p.neg.max_per_image = cfg.neg_max;
  p.neg.score_floor = cfg.score_floor;
  if (cfg.coverage == "center")
    p.neg.coverage = cf::ProposalCoverage::kCenter;
  else if (cfg.coverage == "enclose")
    p.neg.coverage = cf::ProposalCoverage::kEnclose;
  else
    throw cf::MalformedInputError("coverage must be \"center\" or \"enclose\"");
  p.seed = cfg.seed;
  p.epoch = cfg.epoch;
  if (cfg.neg_max < 0) throw cf::MalformedInputError("--neg-max must be >= 0");
  if (cfg.min_proposals < 1) throw cf::MalformedInputError("--min-proposals must be >= 1");
  return p;
}

cf::ManifestHeader make_header(const RunConfig& cfg, const cf::MineParams& params) {
  cf::ManifestHeader h;
  h.config_hash = cf::compute_config_hash(params.pyramid, params.neg, cfg.flip);
  h.seed = cfg.seed;
  h.epoch = cfg.epoch;
  h.flip = cfg.flip;
  h.min_proposals = params.neg.min_proposals;
  h.neg_max = params.neg.max_per_image;
  h.score_floor = params.neg.score_floor;
  h.coverage = cfg.coverage;
  h.pyramid = params.pyramid;
  return h;
}

const std::vector<cf::Proposal>* props_for(const cf::ProposalMap& m, std::int64_t id) {
  auto it = m.find(id);
  return it == m.end() ? nullptr : &it->second;
}

int cmd_positive(const RunConfig& cfg) {
  if (cfg.annotations.empty())
    throw cf::MalformedInputError("positive: --annotations is required");
  if (cfg.out.empty()) throw cf::MalformedInputError("positive: --out is required");

  const cf::MineParams params = mine_params(cfg);
  cf::Dataset ds = cf::load_annotations(cfg.annotations);
  if (cfg.flip) ds = cf::flip_augment(ds);

  cf::ManifestWriter writer(cfg.out, make_header(cfg, params));
  std::int64_t n_chips = 0;
  std::int64_t uncoverable = 0;
  cf::ordered_parallel_produce<cf::ImageChips>(
      ds.images.size(), cfg.workers,
      [&](std::size_t i) {
        const cf::Image& im = ds.images[i];
        return cf::mine_image(im, ds.gts_for(im.id), nullptr, params, false);
      },
      [&](std::size_t, cf::ImageChips&& chips) {
        uncoverable += chips.uncoverable;
        for (const auto& r : chips.positives) {
          writer.add(r);
          ++n_chips;
        }
      });
  writer.close();

  std::cout << "{\"command\":\"positive\",\"images\":" << ds.images.size()
            << ",\"chips\":" << n_chips << ",\"uncoverable\":" << uncoverable
            << ",\"coverage\":\"" << (uncoverable == 0 ? "100%" : "incomplete") << "\"}\n";
  return kExitOk;
}

int cmd_negative(const RunConfig& cfg) {
  if (cfg.proposals.empty())
    throw cf::MalformedInputError("negative: --proposals is required");
  if (cfg.annotations.empty())
    throw cf::MalformedInputError("negative: --annotations is required");
  if (cfg.out.empty()) throw cf::MalformedInputError("negative: --out is required");

  const cf::MineParams params = mine_params(cfg);
  cf::Dataset ds = cf::load_annotations(cfg.annotations);
  cf::ProposalMap proposals = cf::load_proposals(cfg.proposals);
  if (cfg.flip) {
    proposals = cf::flip_augment_proposals(proposals, ds);
    ds = cf::flip_augment(ds);
  }

  cf::ManifestWriter writer(cfg.out, make_header(cfg, params));
  std::int64_t n_chips = 0;
  cf::ordered_parallel_produce<cf::ImageChips>(
      ds.images.size(), cfg.workers,
      [&](std::size_t i) {
        const cf::Image& im = ds.images[i];
        return cf::mine_image(im, ds.gts_for(im.id), props_for(proposals, im.id), params,
                              true);
      },
      [&](std::size_t, cf::ImageChips&& chips) {
        for (const auto& r : chips.negatives) {
          writer.add(r);
          ++n_chips;
        }
      });
  writer.close();

  std::cout << "{\"command\":\"negative\",\"images\":" << ds.images.size()
            << ",\"chips\":" << n_chips << ",\"epoch\":" << cfg.epoch << "}\n";
  return kExitOk;
}

int cmd_labels(const RunConfig& cfg, const std::string& manifest_path) {
  if (manifest_path.empty()) throw cf::MalformedInputError("labels: --manifest is required");
  if (cfg.annotations.empty())
    throw cf::MalformedInputError("labels: --annotations is required");
  if (cfg.proposals.empty()) throw cf::MalformedInputError("labels: --proposals is required");
  if (cfg.out.empty()) throw cf::MalformedInputError("labels: --out is required");

  cf::ManifestReader reader(manifest_path);
  const cf::ManifestHeader header = reader.header();

  cf::Dataset ds = cf::load_annotations(cfg.annotations);
  cf::ProposalMap proposals = cf::load_proposals(cfg.proposals);
  if (header.flip) {
    proposals = cf::flip_augment_proposals(proposals, ds);
    ds = cf::flip_augment(ds);
  }

  cf::ManifestWriter writer(cfg.out, header);
  std::int64_t n_records = 0;
  std::int64_t n_labels = 0;

  // Chunked so million-record manifests stream instead of loading whole.
  constexpr std::size_t kChunk = 4096;
  std::vector<cf::ChipRecord> chunk;
  chunk.reserve(kChunk);
  bool done = false;
  while (!done) {
    chunk.clear();
    while (chunk.size() < kChunk) {
      auto r = reader.next();
      if (!r) {
        done = true;
        break;
      }
      chunk.push_back(std::move(*r));
    }
    cf::parallel_for(chunk.size(), cfg.workers, [&](std::size_t i) {
      cf::ChipRecord& rec = chunk[i];
      const cf::Image* im = ds.find_image(rec.image_id);
      if (im == nullptr)
        throw cf::UnknownImageError("manifest record references unknown image_id " +
                                    std::to_string(rec.image_id));
      const cf::ScaleSpec& spec = header.pyramid.at(rec.scale_index);
      const cf::Canvas canvas = cf::resolve_canvas(im->width, im->height, spec);

      std::vector<cf::Box> boxes;
      std::vector<int> index_map;
      if (const auto* props = props_for(proposals, rec.image_id)) {
        for (std::size_t p = 0; p < props->size(); ++p) {
          const cf::Box scaled = cf::scale_box((*props)[p].box, canvas.factor);
          const auto clipped = cf::clip(scaled, rec.rect_canvas);
          if (!clipped) continue;
          boxes.push_back(cf::Box{clipped->x - rec.rect_canvas.x,
                                  clipped->y - rec.rect_canvas.y, clipped->w, clipped->h});
          index_map.push_back(static_cast<int>(p));
        }
      }
      rec.labels = cf::assign_proposal_labels(boxes, rec, spec, canvas.factor);
      for (std::size_t k = 0; k < rec.labels.size(); ++k)
        rec.labels[k].proposal_index = index_map[k];
      rec.has_labels = true;
    });
    for (const auto& rec : chunk) {
      writer.add(rec);
      ++n_records;
      n_labels += static_cast<std::int64_t>(rec.labels.size());
    }
  }
  writer.close();

  std::cout << "{\"command\":\"labels\",\"records\":" << n_records
            << ",\"labels\":" << n_labels << "}\n";
  return kExitOk;
}

int cmd_stats(const RunConfig& cfg, const std::vector<std::string>& manifest_paths,
              const std::string& csv_path) {
  if (manifest_paths.empty()) throw cf::MalformedInputError("stats: --manifest is required");
  if (cfg.annotations.empty())
    throw cf::MalformedInputError("stats: --annotations is required");

  cf::ManifestReader first(manifest_paths.front());
  const bool flip = first.header().flip;

  cf::Dataset ds = cf::load_annotations(cfg.annotations);
  if (flip) ds = cf::flip_augment(ds);

  cf::PixelReportBuilder builder(ds);
  for (const auto& path : manifest_paths) {
    cf::ManifestReader reader(path);
    if (reader.header().flip != flip)
      throw cf::MalformedInputError("stats: manifests disagree on flip augmentation");
    while (auto r = reader.next()) builder.add(*r);
  }
  const cf::PixelReport report = builder.finish();

  std::cout << report.to_json() << "\n";
  std::cout << report.to_table();
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw cf::IoError("cannot write histogram CSV: " + csv_path);
    csv << report.histogram_csv();
  }
  return kExitOk;
}

int cmd_synth(const cf::SynthParams& sp, std::uint64_t seed,
              const std::string& out_annotations, const std::string& out_proposals) {
  if (out_annotations.empty())
    throw cf::MalformedInputError("synth: --out-annotations is required");
  const cf::SynthScenes scenes = cf::synth_scenes(sp, seed);

  std::ofstream ann(out_annotations, std::ios::binary);
  if (!ann) throw cf::IoError("cannot write: " + out_annotations);
  ann << cf::dataset_to_coco_json(scenes.ds) << "\n";
  if (!ann) throw cf::IoError("short write: " + out_annotations);

  if (!out_proposals.empty()) {
    std::ofstream props(out_proposals, std::ios::binary);
    if (!props) throw cf::IoError("cannot write: " + out_proposals);
    props << cf::proposals_to_jsonl(scenes.proposals);
    if (!props) throw cf::IoError("short write: " + out_proposals);
  }

  std::int64_t n_props = 0;
  for (const auto& [id, v] : scenes.proposals) n_props += static_cast<std::int64_t>(v.size());
  std::cout << "{\"command\":\"synth\",\"images\":" << scenes.ds.images.size()
            << ",\"annotations\":" << scenes.ds.annotations.size()
            << ",\"proposals\":" << n_props << "}\n";
  return kExitOk;
}

int cmd_bench(const RunConfig& cfg, int n_images) {
  cf::SynthParams sp;
  sp.n_images = n_images;
  const cf::SynthScenes scenes = cf::synth_scenes(sp, cfg.seed);
  const cf::MineParams params = mine_params(cfg);

  const int workers = cf::resolve_workers(cfg.workers);
  const cf::BenchResult base = cf::bench_throughput(scenes.ds, scenes.proposals, params, 1);
  const cf::BenchResult run =
      cf::bench_throughput(scenes.ds, scenes.proposals, params, workers);

  const bool identical = base.output_hash == run.output_hash;
  std::string out = "{\"command\":\"bench\",\"images\":" + std::to_string(run.n_images);
  out += ",\"records\":" + std::to_string(run.n_records);
  out += ",\"workers\":" + std::to_string(workers);
  out += ",\"images_per_second\":" + cf::f6(run.images_per_second);
  out += ",\"single_worker_ips\":" + cf::f6(base.images_per_second);
  out += ",\"speedup\":" +
         cf::f6(run.wall_seconds > 0 ? base.wall_seconds / run.wall_seconds : 0.0);
  out += ",\"kernel_backend\":\"" +
         cf::kernels::backend_name(cf::kernels::active_backend()) + "\"";
  out += ",\"outputs_identical\":";
  out += identical ? "true" : "false";
  out += "}";
  std::cout << out << "\n";
  return identical ? kExitOk : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chipforge: scale-adaptive training chip mining"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string manifest_path;
  std::vector<std::string> manifest_paths;
  std::string csv_path;
  int bench_images = 10000;

  cf::SynthParams sp;
  std::string synth_out_annotations;
  std::string synth_out_proposals;

  CLI::App* positive = app.add_subcommand("positive", "mine positive chips");
  add_common_flags(positive, cfg);

  CLI::App* negative = app.add_subcommand("negative", "mine + sample negative chips");
  add_common_flags(negative, cfg);

  CLI::App* labels = app.add_subcommand("labels", "attach proposal labels to a manifest");
  add_common_flags(labels, cfg);
  labels->add_option("--manifest", manifest_path, "input manifest");

  CLI::App* stats = app.add_subcommand("stats", "pixel/chip accounting for manifests");
  add_common_flags(stats, cfg);
  stats->add_option("--manifest", manifest_paths, "manifest path (repeatable)");
  stats->add_option("--histogram-csv", csv_path, "write chips-per-image histogram CSV");

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--images", sp.n_images, "number of images");
  synth->add_option("--seed", cfg.seed, "RNG seed");
  synth->add_option("--mean-boxes", sp.mean_boxes, "mean ground-truth boxes per image");
  synth->add_option("--noise-rate", sp.noise_rate, "mean background proposals per image");
  synth->add_option("--min-side", sp.min_side, "minimum box side");
  synth->add_option("--max-side", sp.max_side, "maximum box side");
  synth->add_option("--out-annotations", synth_out_annotations, "annotation JSON output");
  synth->add_option("--out-proposals", synth_out_proposals, "proposal JSONL output");

  CLI::App* bench = app.add_subcommand("bench", "mining throughput on synthetic data");
  add_common_flags(bench, cfg);
  bench->add_option("--images", bench_images, "synthetic corpus size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    merge_config_file(cmd, cfg);
    if (cmd == positive) return cmd_positive(cfg);
    if (cmd == negative) return cmd_negative(cfg);
    if (cmd == labels) return cmd_labels(cfg, manifest_path);
    if (cmd == stats) return cmd_stats(cfg, manifest_paths, csv_path);
    if (cmd == synth)
      return cmd_synth(sp, cfg.seed, synth_out_annotations, synth_out_proposals);
    if (cmd == bench) return cmd_bench(cfg, bench_images);
  } catch (const cf::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const cf::MalformedInputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
