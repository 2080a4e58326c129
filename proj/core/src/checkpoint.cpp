#include <nlohmann/json.hpp>

#include "timepoint/learner.hpp"

namespace timepoint {

namespace {

constexpr std::string_view kFormat = "timepoint-sorter";
constexpr int kVersion = 1;

}  // namespace

std::string save_checkpoint(const Checkpoint& c) {
  using json = nlohmann::ordered_json;
  const auto& p = c.params;
  json heads = json::object();
  for (auto tp : kPointPairs) {
    json w1 = json::array(), b1 = json::array(), w2 = json::array(), b2 = json::array();
    for (std::size_t h = 0; h < p.hidden(); ++h) {
      for (std::size_t d = 0; d < p.dim(); ++d) w1.push_back(p.w1(tp, h, d));
      b1.push_back(p.b1(tp, h));
    }
    for (std::size_t q = 0; q < 2; ++q) {
      for (std::size_t h = 0; h < p.hidden(); ++h) w2.push_back(p.w2(tp, q, h));
      b2.push_back(p.b2(tp, q));
    }
    heads[std::string(to_string(tp))] = {{"w1", w1}, {"b1", b1}, {"w2", w2}, {"b2", b2}};
  }
  json j{{"format", kFormat},
         {"version", kVersion},
         {"dim", p.dim()},
         {"hidden", p.hidden()},
         {"tau", c.temperature},
         {"activation", std::string(to_string(p.activation()))},
         {"heads", heads}};
  return j.dump(1) + "\n";
}

Checkpoint load_checkpoint(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != kFormat) throw ParseError("not a sorter checkpoint", 1, 1);
    const int version = j.at("version").get<int>();
    if (version != kVersion) {
      throw ParseError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                           std::to_string(kVersion) + ")",
                       1, 1);
    }
    Checkpoint c{SorterParams(j.at("dim").get<std::size_t>(), j.at("hidden").get<std::size_t>(),
                              parse_activation(j.at("activation").get<std::string>())),
                 j.at("tau").get<double>()};
    if (!(c.temperature > 0.0)) throw ParseError("checkpoint temperature must be positive", 1, 1);
    auto& p = c.params;
    auto expect = [](const nlohmann::json& a, std::size_t n, const char* what) {
      if (!a.is_array() || a.size() != n) {
        throw ParseError(std::string("checkpoint field '") + what + "' has the wrong size", 1, 1);
      }
    };
    for (auto tp : kPointPairs) {
      const auto& head = j.at("heads").at(std::string(to_string(tp)));
      const auto& w1 = head.at("w1");
      const auto& b1 = head.at("b1");
      const auto& w2 = head.at("w2");
      const auto& b2 = head.at("b2");
      expect(w1, p.hidden() * p.dim(), "w1");
      expect(b1, p.hidden(), "b1");
      expect(w2, 2 * p.hidden(), "w2");
      expect(b2, 2, "b2");
      for (std::size_t h = 0; h < p.hidden(); ++h) {
        for (std::size_t d = 0; d < p.dim(); ++d) p.w1(tp, h, d) = w1[h * p.dim() + d].get<double>();
        p.b1(tp, h) = b1[h].get<double>();
      }
      for (std::size_t q = 0; q < 2; ++q) {
        for (std::size_t h = 0; h < p.hidden(); ++h) p.w2(tp, q, h) = w2[q * p.hidden() + h].get<double>();
        p.b2(tp, q) = b2[q].get<double>();
      }
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), 1, 1);
  } catch (const DomainError& e) {
    throw ParseError(std::string("checkpoint: ") + e.what(), 1, 1);
  }
}

}  // namespace timepoint
