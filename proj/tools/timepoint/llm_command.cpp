#include <chrono>
#include <map>
#include <ostream>

#include <timepoint/builtin.hpp>
#include <timepoint/dataio.hpp>
#include <timepoint/llm_bridge.hpp>
#include <timepoint/transport.hpp>

#include "timepoint/commands.hpp"

namespace timepoint::cli {

namespace {

using ojson = nlohmann::ordered_json;

enum class TransportKind { Mock, Http, Replay };

TransportKind parse_transport(std::string_view name) {
  if (name == "http") return TransportKind::Http;
  if (name == "replay") return TransportKind::Replay;
  return TransportKind::Mock;
}

EventMention mention(const std::string& trigger, std::optional<std::size_t> offset) {
  return offset ? EventMention(trigger, *offset) : EventMention(trigger);
}

struct LlmRunOptions {
  std::string input;
  std::string output;
  std::string transport = "mock";
  std::string script;
  std::string cache_dir;
  std::string endpoint = HttpSettings{}.endpoint;
  std::string model = HttpSettings{}.model;
  double temperature = 0.0;
  int max_tokens = 256;
  std::size_t max_in_flight = 1;
  int min_interval_ms = 0;
  int retries = 3;
  int timeout_s = 60;
  std::string mode = "unified";
  std::string prompt_template = "classification";
  int samples = 5;
  std::uint64_t seed = 0;
};

}  // namespace

Command register_llm_run(CLI::App& app, Settings& settings) {
  auto o = std::make_shared<LlmRunOptions>();
  auto* sub = app.add_subcommand("llm-run", "Ask a chat model about event pairs and decode its answers");
  settings.track(*sub, sub->add_option("--input", o->input, "Instance file (JSONL)"), "input");
  settings.require(*sub, "input");
  settings.track(*sub, sub->add_option("-o,--output", o->output, "Prediction file to write"), "output");
  settings.require(*sub, "output");
  settings.track(*sub,
                 sub->add_option("--transport", o->transport, "mock, http or replay")
                     ->check(CLI::IsMember({"mock", "http", "replay"})),
                 "transport");
  settings.track(*sub, sub->add_option("--script", o->script, "Mock transport script (JSON)"), "script");
  settings.track(*sub, sub->add_option("--cache-dir", o->cache_dir, "Response cache directory"), "cache-dir");
  settings.track(*sub, sub->add_option("--endpoint", o->endpoint, "Chat-completions URL"), "endpoint",
                 "TIMEPOINT_LLM_ENDPOINT");
  settings.track(*sub, sub->add_option("--model", o->model, "Model name"), "model", "TIMEPOINT_LLM_MODEL");
  settings.track(*sub, sub->add_option("--temperature", o->temperature, "Sampling temperature"), "temperature");
  settings.track(*sub, sub->add_option("--max-tokens", o->max_tokens, "Response length limit"), "max-tokens");
  settings.track(*sub,
                 sub->add_option("--max-in-flight", o->max_in_flight, "Concurrent instances")
                     ->check(CLI::PositiveNumber),
                 "max-in-flight");
  settings.track(*sub, sub->add_option("--min-interval-ms", o->min_interval_ms, "Delay between HTTP requests"),
                 "min-interval-ms");
  settings.track(*sub, sub->add_option("--retries", o->retries, "HTTP retries with exponential backoff"),
                 "retries");
  settings.track(*sub, sub->add_option("--timeout", o->timeout_s, "HTTP timeout in seconds"), "timeout");
  settings.track(*sub,
                 sub->add_option("--mode", o->mode, "unified or classification")
                     ->check(CLI::IsMember({"unified", "classification"})),
                 "mode");
  settings.track(*sub, sub->add_option("--template", o->prompt_template, "Classification template name"),
                 "template");
  settings.track(*sub, sub->add_option("--samples", o->samples, "Self-consistency samples")->check(CLI::PositiveNumber),
                 "samples");
  settings.track(*sub, sub->add_option("--seed", o->seed, "Seed for candidate order"), "seed");

  return {sub, [o, sub](Context& ctx) {
            RunManifest manifest("llm-run", ctx.argv);
            const auto instances = read_llm_instances(o->input);
            manifest.add_input("input", o->input);

            std::shared_ptr<Transport> inner;
            switch (parse_transport(o->transport)) {
              case TransportKind::Mock:
                if (o->script.empty()) throw CLI::RequiredError("--script (needed by --transport mock)");
                inner = MockTransport::from_script_file(o->script);
                manifest.add_input("script", o->script);
                break;
              case TransportKind::Http: {
                auto http = HttpSettings::from_environment();
                http.endpoint = o->endpoint;
                http.model = o->model;
                http.timeout = std::chrono::seconds(o->timeout_s);
                inner = std::make_shared<PacedTransport>(
                    std::make_shared<HttpTransport>(std::move(http)),
                    PacingOptions{.min_interval = std::chrono::milliseconds(o->min_interval_ms),
                                  .max_retries = o->retries});
                break;
              }
              case TransportKind::Replay:
                if (o->cache_dir.empty()) throw CLI::RequiredError("--cache-dir (needed by --transport replay)");
                break;
            }
            std::shared_ptr<CachingTransport> cache;
            if (!o->cache_dir.empty()) cache = std::make_shared<CachingTransport>(o->cache_dir, inner);
            Transport& transport = cache ? static_cast<Transport&>(*cache) : *inner;

            const LlmOptions llm{.model = o->model, .temperature = o->temperature, .max_tokens = o->max_tokens};
            std::vector<PredictionRecord> predictions;
            std::string traces;
            std::size_t failures = 0;
            if (o->mode == "unified") {
              for (const auto& r : run_unified_batch(instances, transport, llm, o->max_in_flight)) {
                ojson line{{"id", r.id}, {"trace", ojson::parse(r.trace.to_json())}};
                if (r.error.empty()) {
                  predictions.push_back({r.id, std::nullopt, r.trace.relation, false});
                } else {
                  ++failures;
                  line["error"] = r.error;
                  ctx.err << "error: " << r.id << ": " << r.error << '\n';
                }
                traces += line.dump() + "\n";
              }
            } else {
              const auto& t = find_prompt_template(o->prompt_template);
              const auto& schema = builtin_schema("tbdense");
              const ClassificationOptions options{.llm = llm, .samples = o->samples, .seed = o->seed};
              for (const auto& in : instances) {
                const auto e1 = mention(in.event1, in.event1_offset);
                const auto e2 = mention(in.event2, in.event2_offset);
                ojson line{{"id", in.id}};
                try {
                  const auto trace = classify(t, in.text, e1, e2, schema, transport, options);
                  predictions.push_back({in.id, std::nullopt, trace.relation, false});
                  line["trace"] = ojson::parse(trace.to_json());
                } catch (const TransportError& e) {
                  ++failures;
                  line["error"] = e.what();
                  ctx.err << "error: " << in.id << ": " << e.what() << '\n';
                }
                traces += line.dump() + "\n";
              }
            }
            write_text_file(o->output, format_predictions(predictions));
            const std::string trace_path = o->output + ".traces.jsonl";
            write_text_file(trace_path, traces);

            manifest.config = {{"input", o->input},
                               {"output", o->output},
                               {"transport", o->transport},
                               {"script", o->script},
                               {"cache_dir", o->cache_dir},
                               {"endpoint", o->transport == "http" ? o->endpoint : ""},
                               {"model", o->model},
                               {"temperature", o->temperature},
                               {"max_tokens", o->max_tokens},
                               {"max_in_flight", o->max_in_flight},
                               {"mode", o->mode},
                               {"template", o->mode == "classification" ? o->prompt_template : ""},
                               {"samples", o->samples},
                               {"seed", o->seed}};
            manifest.sources = ctx.settings.sources(*sub);
            manifest.seed = o->seed;
            manifest.stats = {{"instances", instances.size()}, {"failures", failures}};
            if (cache) {
              manifest.stats["cache_hits"] = cache->hits();
              manifest.stats["cache_misses"] = cache->misses();
            }
            manifest.add_artifact("predictions", o->output);
            manifest.add_artifact("traces", trace_path);
            manifest.write_beside(o->output);

            ctx.out << "wrote " << predictions.size() << " predictions to " << o->output;
            if (failures > 0) ctx.out << " (" << failures << " failed)";
            ctx.out << '\n';
            return failures == 0 ? kExitOk : kExitUsage;
          }};
}

}  // namespace timepoint::cli
