#include "timepoint/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <timepoint/builtin.hpp>
#include <timepoint/dataio.hpp>
#include <timepoint/inference.hpp>
#include <timepoint/learner.hpp>
#include <timepoint/metrics.hpp>

namespace timepoint::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

SchemaInput read_schema_arg(const std::string& arg, bool validated) {
  if (fs::is_regular_file(arg)) {
    auto text = read_text_file(arg);
    auto schema = validated ? load_schema(text) : parse_schema(text);
    return {std::make_shared<const RelationSchema>(std::move(schema)), arg, std::move(text)};
  }
  const auto names = builtin_schema_names();
  if (std::find(names.begin(), names.end(), arg) != names.end()) {
    return {std::make_shared<const RelationSchema>(builtin_schema(arg)), "builtin:" + arg,
            std::string(builtin_schema_text(arg))};
  }
  throw IoError("no schema file or built-in schema named '" + arg + "'");
}

void record_schema(RunManifest& m, const std::string& key, const SchemaInput& s) {
  m.add_input(key, s.label, s.text);
}

void add_format_option(CLI::App& sub, Settings& settings, OutputFormat& format) {
  const std::map<std::string, OutputFormat> names{{"table", OutputFormat::Table}, {"json", OutputFormat::Json}};
  settings.track(sub,
                 sub.add_option("--format", format, "Report format: table or json")
                     ->transform(CLI::CheckedTransformer(names, CLI::ignore_case)),
                 "format");
}

namespace {

std::string format_fixed(double v, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

CLI::Option* add_semantics(CLI::App& sub, Settings& settings, std::string& semantics) {
  return settings.track(sub,
                        sub.add_option("--semantics", semantics, "Soft semantics: paper_soft or prob_sum")
                            ->check(CLI::IsMember({"paper_soft", "prob_sum"})),
                        "semantics");
}

CLI::Option* add_seed(CLI::App& sub, Settings& settings, std::uint64_t& seed) {
  return settings.track(sub, sub.add_option("--seed", seed, "Seed for every random choice"), "seed");
}

CLI::Option* add_output(CLI::App& sub, Settings& settings, std::string& output, const std::string& what) {
  auto* opt = settings.track(sub, sub.add_option("-o,--output", output, what), "output");
  settings.require(sub, "output");
  return opt;
}

std::vector<PairRecord> of_split(const std::vector<PairRecord>& records, Split split) {
  std::vector<PairRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [&](const PairRecord& r) { return r.split == split; });
  return out;
}

WarningSink warn_to(std::ostream& err) {
  return [&err](const std::string& message) { err << "warning: " << message << '\n'; };
}

// ---------------------------------------------------------------- validate-schema

Command validate_schema_command(CLI::App& app, Settings& settings) {
  struct Options {
    std::string schema;
    std::string domain = "consistent";
    OutputFormat format = OutputFormat::Table;
    std::string output;
  };
  auto o = std::make_shared<Options>();
  auto* sub = app.add_subcommand("validate-schema", "Check that a schema is exclusive and exhaustive");
  sub->add_option("schema", o->schema, "Schema file or built-in name")->required();
  settings.track(*sub,
                 sub->add_option("--domain", o->domain, "Assignments to check: all or consistent")
                     ->check(CLI::IsMember({"all", "consistent"})),
                 "domain");
  add_format_option(*sub, settings, o->format);
  settings.track(*sub, sub->add_option("-o,--output", o->output, "Also write the JSON report here"), "output");

  return {sub, [o, sub](Context& ctx) {
            RunManifest manifest("validate-schema", ctx.argv);
            const auto schema = read_schema_arg(o->schema, false);
            const auto report = validate(*schema.schema, o->domain == "all" ? ValidationDomain::All : ValidationDomain::Consistent);
            ctx.out << (o->format == OutputFormat::Json ? report_to_json(report) : report_to_table(report));
            ctx.out << '\n';
            if (!o->output.empty()) {
              record_schema(manifest, "schema", schema);
              manifest.config = {{"schema", o->schema}, {"domain", o->domain}};
              manifest.sources = ctx.settings.sources(*sub);
              manifest.stats = {{"exclusive", report.exclusive}, {"exhaustive", report.exhaustive}};
              write_text_file(o->output, report_to_json(report) + "\n");
              manifest.add_artifact("report", o->output);
              manifest.write_beside(o->output);
            }
            return report.ok() ? kExitOk : kExitDomainFailure;
          }};
}

// ---------------------------------------------------------------- train

Command train_command(CLI::App& app, Settings& settings) {
  struct Options {
    std::string data;
    std::string schema = "tbdense";
    std::string output;
    TrainConfig cfg;
    std::string activation = "tanh";
    std::string semantics = "paper_soft";
    bool augment = false;
    OutputFormat format = OutputFormat::Table;
  };
  auto o = std::make_shared<Options>();
  auto* sub = app.add_subcommand("train", "Train a time point sorter on a pair file");
  settings.track(*sub, sub->add_option("--data", o->data, "Pair file (JSONL) with features"), "data");
  settings.require(*sub, "data");
  settings.track(*sub, sub->add_option("--schema", o->schema, "Schema file or built-in name"), "schema");
  add_output(*sub, settings, o->output, "Checkpoint path");
  settings.track(*sub, sub->add_option("--lr", o->cfg.learning_rate, "Learning rate"), "lr");
  settings.track(*sub, sub->add_option("--epochs", o->cfg.epochs, "Number of epochs"), "epochs");
  settings.track(*sub, sub->add_option("--batch-size", o->cfg.batch_size, "Mini-batch size"),
                 "batch-size");
  settings.track(*sub, sub->add_option("--tau", o->cfg.temperature, "Sigmoid temperature"), "tau");
  add_seed(*sub, settings, o->cfg.seed);
  settings.track(*sub, sub->add_option("--hidden", o->cfg.hidden, "Hidden width per head"), "hidden");
  settings.track(*sub, sub->add_option("--epsilon", o->cfg.epsilon, "Loss smoothing constant"),
                 "epsilon");
  settings.track(*sub,
                 sub->add_option("--activation", o->activation, "Hidden activation: tanh or sigmoid")
                     ->check(CLI::IsMember({"tanh", "sigmoid"})),
                 "activation");
  add_semantics(*sub, settings, o->semantics);
  settings.track(*sub, sub->add_flag("--normalize", o->cfg.normalize, "Normalize scores inside the loss"),
                 "normalize");
  settings.track(*sub, sub->add_flag("--augment", o->augment, "Add event-swapped copies of the train split"),
                 "augment");
  add_format_option(*sub, settings, o->format);

  return {sub, [o, sub](Context& ctx) {
            RunManifest manifest("train", ctx.argv);
            o->cfg.activation = parse_activation(o->activation);
            o->cfg.semantics = parse_semantics(o->semantics);
            const auto schema = read_schema_arg(o->schema);
            const auto& s = *schema.schema;
            const auto records = read_pairs(o->data, s);
            auto train_records = of_split(records, Split::Train);
            const auto original_size = train_records.size();
            if (o->augment) train_records = symmetry_augment(train_records, s, warn_to(ctx.err));
            const auto train_set = to_labeled(train_records);
            const auto result = train(train_set, s, o->cfg);

            const Checkpoint checkpoint{result.params, o->cfg.temperature};
            write_text_file(o->output, save_checkpoint(checkpoint));
            const std::string history_path = o->output + ".history.jsonl";
            std::string history;
            ojson history_json = ojson::array();
            for (const auto& e : result.history) {
              ojson line{{"epoch", e.epoch}, {"loss", e.loss}, {"micro_f1", e.micro_f1}};
              history += line.dump() + "\n";
              history_json.push_back(std::move(line));
            }
            write_text_file(history_path, history);

            std::optional<double> dev_f1;
            const auto dev_records = of_split(records, Split::Dev);
            if (!dev_records.empty()) {
              const auto dev = to_labeled(dev_records);
              const auto pred = predict_all(dev, result.params, o->cfg.temperature, s, o->cfg.semantics);
              std::vector<std::string> gold;
              for (const auto& d : dev) gold.push_back(d.gold);
              dev_f1 = micro_f1_excluding_vague(gold, pred, s.vague_name()).f1;
            }

            manifest.config = {{"data", o->data},
                               {"schema", o->schema},
                               {"output", o->output},
                               {"lr", o->cfg.learning_rate},
                               {"epochs", o->cfg.epochs},
                               {"batch_size", o->cfg.batch_size},
                               {"tau", o->cfg.temperature},
                               {"seed", o->cfg.seed},
                               {"hidden", o->cfg.hidden},
                               {"epsilon", o->cfg.epsilon},
                               {"activation", to_string(o->cfg.activation)},
                               {"semantics", to_string(o->cfg.semantics)},
                               {"normalize", o->cfg.normalize},
                               {"augment", o->augment}};
            manifest.sources = ctx.settings.sources(*sub);
            manifest.seed = o->cfg.seed;
            manifest.add_input("data", o->data);
            record_schema(manifest, "schema", schema);
            manifest.add_artifact("checkpoint", o->output);
            manifest.add_artifact("history", history_path);
            manifest.stats = {{"train_size", train_set.size()},
                              {"train_size_before_augment", original_size},
                              {"dev_size", dev_records.size()}};
            if (!result.history.empty()) {
              manifest.stats["final_loss"] = result.history.back().loss;
              manifest.stats["final_train_micro_f1"] = result.history.back().micro_f1;
            }
            if (dev_f1) manifest.stats["dev_micro_f1"] = *dev_f1;
            manifest.write_beside(o->output);

            if (o->format == OutputFormat::Json) {
              ojson j{{"checkpoint", o->output}, {"train_size", train_set.size()}, {"history", history_json}};
              if (dev_f1) j["dev_micro_f1"] = *dev_f1;
              ctx.out << j.dump(2) << '\n';
            } else {
              ctx.out << "epoch  loss      micro_f1\n";
              for (const auto& e : result.history) {
                ctx.out << std::setw(5) << e.epoch << "  " << format_fixed(e.loss) << "    "
                        << format_fixed(e.micro_f1) << '\n';
              }
              ctx.out << "train size " << train_set.size();
              if (dev_f1) ctx.out << ", dev micro-F1 " << format_fixed(*dev_f1);
              ctx.out << ", checkpoint " << o->output << '\n';
            }
            return kExitOk;
          }};
}

// ---------------------------------------------------------------- eval

Command eval_command(CLI::App& app, Settings& settings) {
  struct Options {
    std::string predictions;
    std::string gold;
    std::string schema = "tbdense";
    std::string semantics = "paper_soft";
    bool macro_includes_vague = false;
    double min_f1 = 0.0;
    OutputFormat format = OutputFormat::Table;
    std::string output;
  };
  auto o = std::make_shared<Options>();
  auto* sub = app.add_subcommand("eval", "Score predictions against gold pairs");
  settings.track(*sub, sub->add_option("--predictions", o->predictions, "Prediction file (JSONL)"),
                 "predictions");
  settings.require(*sub, "predictions");
  settings.track(*sub, sub->add_option("--gold", o->gold, "Gold pair file (JSONL)"), "gold");
  settings.require(*sub, "gold");
  settings.track(*sub, sub->add_option("--schema", o->schema, "Schema file or built-in name"), "schema");
  add_semantics(*sub, settings, o->semantics);
  settings.track(*sub,
                 sub->add_flag("--macro-includes-vague", o->macro_includes_vague,
                               "Count the Vague label in macro-F1"),
                 "macro-includes-vague");
  settings.track(*sub,
                 sub->add_option("--min-f1", o->min_f1, "Exit with 1 when micro-F1 is below this")
                     ->check(CLI::Range(0.0, 1.0)),
                 "min-f1");
  add_format_option(*sub, settings, o->format);
  settings.track(*sub, sub->add_option("-o,--output", o->output, "Also write the JSON report here"), "output");

  return {sub, [o, sub](Context& ctx) {
            RunManifest manifest("eval", ctx.argv);
            const auto schema = read_schema_arg(o->schema);
            const auto& s = *schema.schema;
            const auto gold_records = read_pairs(o->gold, s);
            const auto predictions = read_predictions(o->predictions);
            std::map<std::string, const PredictionRecord*> by_id;
            for (const auto& p : predictions) {
              if (!by_id.emplace(p.id, &p).second) throw DuplicateId(p.id);
            }
            const auto semantics = parse_semantics(o->semantics);
            std::vector<std::string> gold;
            std::vector<std::string> pred;
            std::vector<std::string> hard;
            std::size_t hard_ambiguous = 0;
            bool all_q = true;
            for (const auto& g : gold_records) {
              auto it = by_id.find(g.id);
              if (it == by_id.end()) throw DomainError("no prediction for id '" + g.id + "'");
              const auto& p = *it->second;
              gold.push_back(g.gold);
              pred.push_back(p.relation ? *p.relation : transfer_decode(*p.q, s, semantics).relation);
              all_q = all_q && p.q.has_value();
              if (all_q) {
                const auto d = convert(p.q->threshold(), s);
                hard.push_back(d.relation);
                hard_ambiguous += d.ambiguous ? 1 : 0;
              }
            }
            if (by_id.size() > gold_records.size()) {
              ctx.err << "warning: " << by_id.size() - gold_records.size()
                      << " predictions have no gold record and were ignored\n";
            }
            const auto report = evaluate(gold, pred, s, o->macro_includes_vague);
            auto report_json = ojson::parse(report.to_json());
            std::string table = report.to_table();
            if (all_q && !gold.empty()) {
              const auto hard_report = evaluate(gold, hard, s, o->macro_includes_vague);
              report_json["converter"] = {{"micro",
                                           {{"precision", hard_report.micro.precision},
                                            {"recall", hard_report.micro.recall},
                                            {"f1", hard_report.micro.f1}}},
                                          {"macro_f1", hard_report.macro_f1},
                                          {"ambiguous", hard_ambiguous}};
              if (!table.empty() && table.back() != '\n') table += '\n';
              table += "thresholded answers through the converter: micro-F1 " + format_fixed(hard_report.micro.f1) +
                       ", macro-F1 " + format_fixed(hard_report.macro_f1) + ", " +
                       std::to_string(hard_ambiguous) + " ambiguous";
            }
            ctx.out << (o->format == OutputFormat::Json ? report_json.dump(2) : table) << '\n';

            if (!o->output.empty()) {
              manifest.config = {{"predictions", o->predictions},
                                 {"gold", o->gold},
                                 {"schema", o->schema},
                                 {"semantics", o->semantics},
                                 {"macro_includes_vague", o->macro_includes_vague},
                                 {"min_f1", o->min_f1}};
              manifest.sources = ctx.settings.sources(*sub);
              manifest.add_input("predictions", o->predictions);
              manifest.add_input("gold", o->gold);
              record_schema(manifest, "schema", schema);
              manifest.stats = {{"size", report.size}, {"micro_f1", report.micro.f1}, {"macro_f1", report.macro_f1}};
              write_text_file(o->output, report_json.dump(2) + "\n");
              manifest.add_artifact("report", o->output);
              manifest.write_beside(o->output);
            }
            if (report.micro.f1 < o->min_f1) {
              ctx.err << "micro-F1 " << format_fixed(report.micro.f1) << " is below --min-f1 "
                      << format_fixed(o->min_f1) << '\n';
              return kExitDomainFailure;
            }
            return kExitOk;
          }};
}

// ---------------------------------------------------------------- transfer

Command transfer_command(CLI::App& app, Settings& settings) {
  struct Options {
    std::string checkpoint;
    std::string data;
    std::string q_file;
    std::string target_schema = "matres";
    std::string source_schema;
    std::string label_mapping;
    std::string semantics = "paper_soft";
    std::string output;
  };
  auto o = std::make_shared<Options>();
  auto* sub = app.add_subcommand("transfer", "Decode a model's answers under another schema");
  auto* ckpt = settings.track(*sub, sub->add_option("--checkpoint", o->checkpoint, "Trained checkpoint"),
                              "checkpoint");
  auto* data = settings.track(*sub, sub->add_option("--data", o->data, "Pair file with features for --checkpoint"),
                              "data");
  auto* qfile = settings.track(*sub, sub->add_option("--q-file", o->q_file, "Prediction file with q vectors"),
                               "q-file");
  ckpt->excludes(qfile);
  data->needs(ckpt);
  settings.track(*sub,
                 sub->add_option("--target-schema", o->target_schema, "Schema to decode into"),
                 "target-schema");
  settings.track(*sub,
                 sub->add_option("--source-schema", o->source_schema, "Schema the model was trained on"),
                 "source-schema");
  settings.track(*sub,
                 sub->add_option("--label-mapping", o->label_mapping,
                                 "mapping1, mapping2 or a mapping file; decodes in the source schema first"),
                 "label-mapping");
  add_semantics(*sub, settings, o->semantics);
  add_output(*sub, settings, o->output, "Prediction file to write");

  return {sub, [o, sub](Context& ctx) {
            if (o->checkpoint.empty() == o->q_file.empty()) {
              throw CLI::ValidationError("transfer", "exactly one of --checkpoint or --q-file is required");
            }
            if (!o->checkpoint.empty() && o->data.empty()) throw CLI::RequiredError("--data");
            if (!o->label_mapping.empty() && o->source_schema.empty()) {
              throw CLI::RequiredError("--source-schema (needed by --label-mapping)");
            }
            RunManifest manifest("transfer", ctx.argv);
            const auto target = read_schema_arg(o->target_schema);
            record_schema(manifest, "target_schema", target);
            std::optional<SchemaInput> source;
            if (!o->source_schema.empty()) {
              source = read_schema_arg(o->source_schema);
              record_schema(manifest, "source_schema", *source);
            }
            std::optional<LabelMapping> mapping;
            if (!o->label_mapping.empty()) {
              if (fs::is_regular_file(o->label_mapping)) {
                mapping = parse_label_mapping(read_text_file(o->label_mapping), *source->schema, *target.schema);
                manifest.add_input("label_mapping", o->label_mapping);
              } else {
                mapping = builtin_label_mapping(o->label_mapping);
                manifest.add_input("label_mapping", "builtin:" + o->label_mapping, o->label_mapping);
              }
              if (mapping->source() != source->schema->name() || mapping->target() != target.schema->name()) {
                throw DomainError("mapping " + mapping->name() + " goes from " + mapping->source() + " to " +
                                  mapping->target() + ", not from " + source->schema->name() + " to " +
                                  target.schema->name());
              }
            }

            std::vector<PredictionRecord> inputs;
            if (!o->q_file.empty()) {
              inputs = read_predictions(o->q_file);
              manifest.add_input("q_file", o->q_file);
            } else {
              const auto checkpoint = load_checkpoint(read_text_file(o->checkpoint));
              manifest.add_input("checkpoint", o->checkpoint);
              manifest.add_input("data", o->data);
              const auto& label_schema = source ? *source->schema : *target.schema;
              for (const auto& r : read_pairs(o->data, label_schema)) {
                if (!r.features) throw DimensionMismatch("record '" + r.id + "' has no features");
                inputs.push_back({r.id, forward(*r.features, checkpoint.params, checkpoint.temperature), {}, false});
              }
            }

            std::vector<PredictionRecord> out;
            std::size_t ambiguous = 0;
            for (const auto& in : inputs) {
              if (!in.q) throw DomainError("record '" + in.id + "' has no q vector");
              Decision d = mapping ? transfer_decode(*in.q, *source->schema, parse_semantics(o->semantics))
                                   : transfer_decode(*in.q, *target.schema, parse_semantics(o->semantics));
              if (mapping) d.relation = map_labels(d.relation, *mapping);
              ambiguous += d.ambiguous ? 1 : 0;
              out.push_back({in.id, in.q, d.relation, d.ambiguous});
            }
            write_text_file(o->output, format_predictions(out));

            manifest.config = {{"checkpoint", o->checkpoint},
                               {"data", o->data},
                               {"q_file", o->q_file},
                               {"target_schema", o->target_schema},
                               {"source_schema", o->source_schema},
                               {"label_mapping", o->label_mapping},
                               {"semantics", o->semantics},
                               {"output", o->output}};
            manifest.sources = ctx.settings.sources(*sub);
            manifest.stats = {{"records", out.size()}, {"ambiguous", ambiguous}};
            manifest.add_artifact("predictions", o->output);
            manifest.write_beside(o->output);
            ctx.out << "wrote " << out.size() << " predictions to " << o->output << '\n';
            return kExitOk;
          }};
}

// ---------------------------------------------------------------- synth

Command synth_command(CLI::App& app, Settings& settings) {
  struct Options {
    std::size_t n = 1000;
    double sigma = 0.05;
    std::uint64_t seed = 0;
    std::size_t dim = 16;
    std::string schema = "tbdense";
    std::string split = "train";
    std::string output;
  };
  auto o = std::make_shared<Options>();
  auto* sub = app.add_subcommand("synth", "Generate a synthetic pair file");
  settings.track(*sub, sub->add_option("--n", o->n, "Number of records")->check(CLI::PositiveNumber), "n");
  settings.track(*sub,
                 sub->add_option("--sigma", o->sigma, "Feature noise standard deviation")
                     ->check(CLI::NonNegativeNumber),
                 "sigma");
  add_seed(*sub, settings, o->seed);
  settings.track(*sub, sub->add_option("--dim", o->dim, "Feature dimension")->check(CLI::PositiveNumber),
                 "dim");
  settings.track(*sub, sub->add_option("--schema", o->schema, "Schema labelling the records"), "schema");
  settings.track(*sub,
                 sub->add_option("--split", o->split, "Split written on every record")
                     ->check(CLI::IsMember({"train", "dev", "test"})),
                 "split");
  add_output(*sub, settings, o->output, "Pair file to write");

  return {sub, [o, sub](Context& ctx) {
            RunManifest manifest("synth", ctx.argv);
            const auto schema = read_schema_arg(o->schema);
            const auto data = synth_generate(o->n, o->sigma, o->seed, *schema.schema, o->dim);
            const auto records = from_labeled(data, *parse_split(o->split));
            write_pairs(o->output, records);

            manifest.config = {{"n", o->n},         {"sigma", o->sigma},
                               {"seed", o->seed},   {"dim", o->dim},
                               {"schema", o->schema}, {"split", o->split},
                               {"output", o->output}};
            manifest.sources = ctx.settings.sources(*sub);
            manifest.seed = o->seed;
            record_schema(manifest, "schema", schema);
            manifest.stats = {{"records", records.size()}};
            manifest.add_artifact("pairs", o->output);
            manifest.write_beside(o->output);
            ctx.out << "wrote " << records.size() << " records to " << o->output << '\n';
            return kExitOk;
          }};
}

// ---------------------------------------------------------------- augment

Command augment_command(CLI::App& app, Settings& settings) {
  struct Options {
    std::string data;
    std::string schema = "tbdense";
    double fraction = 1.0;
    std::uint64_t seed = 0;
    std::string output;
  };
  auto o = std::make_shared<Options>();
  auto* sub = app.add_subcommand("augment", "Add event-swapped copies of train records");
  settings.track(*sub, sub->add_option("--data", o->data, "Pair file (JSONL), train split only"), "data");
  settings.require(*sub, "data");
  settings.track(*sub, sub->add_option("--schema", o->schema, "Schema file or built-in name"), "schema");
  settings.track(*sub,
                 sub->add_option("--fraction", o->fraction, "Keep a seeded sample of this fraction first"),
                 "fraction");
  add_seed(*sub, settings, o->seed);
  add_output(*sub, settings, o->output, "Pair file to write");

  return {sub, [o, sub](Context& ctx) {
            RunManifest manifest("augment", ctx.argv);
            const auto schema = read_schema_arg(o->schema);
            auto records = read_pairs(o->data, *schema.schema);
            const auto input_size = records.size();
            if (o->fraction != 1.0) records = split_sample(records, o->fraction, o->seed);
            const auto sampled = records.size();
            const auto augmented = symmetry_augment(records, *schema.schema, warn_to(ctx.err));
            write_pairs(o->output, augmented);

            manifest.config = {{"data", o->data},
                               {"schema", o->schema},
                               {"fraction", o->fraction},
                               {"seed", o->seed},
                               {"output", o->output}};
            manifest.sources = ctx.settings.sources(*sub);
            manifest.seed = o->seed;
            manifest.add_input("data", o->data);
            record_schema(manifest, "schema", schema);
            manifest.stats = {{"input_records", input_size},
                              {"sampled_records", sampled},
                              {"output_records", augmented.size()}};
            manifest.add_artifact("pairs", o->output);
            manifest.write_beside(o->output);
            ctx.out << "wrote " << augmented.size() << " records to " << o->output << '\n';
            return kExitOk;
          }};
}

// ---------------------------------------------------------------- convert

Command convert_command(CLI::App& app, Settings& settings) {
  struct Options {
    std::string input;
    std::string schema = "tbdense";
    std::string semantics = "paper_soft";
    std::string output;
  };
  auto o = std::make_shared<Options>();
  auto* sub = app.add_subcommand("convert", "Turn question answers into relations");
  settings.track(*sub, sub->add_option("--q-file", o->input, "Prediction file with q vectors"), "q-file");
  settings.require(*sub, "q-file");
  settings.track(*sub, sub->add_option("--schema", o->schema, "Schema file or built-in name"), "schema");
  add_semantics(*sub, settings, o->semantics);
  add_output(*sub, settings, o->output, "Prediction file to write");

  return {sub, [o, sub](Context& ctx) {
            RunManifest manifest("convert", ctx.argv);
            const auto schema = read_schema_arg(o->schema);
            const auto inputs = read_predictions(o->input);
            std::vector<PredictionRecord> out;
            std::size_t binary = 0;
            for (const auto& in : inputs) {
              if (!in.q) throw DomainError("record '" + in.id + "' has no q vector");
              binary += in.q->is_binary() ? 1 : 0;
              const auto d = transfer_decode(*in.q, *schema.schema, parse_semantics(o->semantics));
              out.push_back({in.id, in.q, d.relation, d.ambiguous});
            }
            write_text_file(o->output, format_predictions(out));

            manifest.config = {{"q_file", o->input},
                               {"schema", o->schema},
                               {"semantics", o->semantics},
                               {"output", o->output}};
            manifest.sources = ctx.settings.sources(*sub);
            manifest.add_input("q_file", o->input);
            record_schema(manifest, "schema", schema);
            manifest.stats = {{"records", out.size()}, {"binary", binary}};
            manifest.add_artifact("predictions", o->output);
            manifest.write_beside(o->output);
            ctx.out << "wrote " << out.size() << " predictions to " << o->output << '\n';
            return kExitOk;
          }};
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app, Settings& settings) {
  return {validate_schema_command(app, settings), train_command(app, settings), eval_command(app, settings),
          transfer_command(app, settings),        synth_command(app, settings), augment_command(app, settings),
          convert_command(app, settings),         register_llm_run(app, settings)};
}

}  // namespace timepoint::cli
