#include "feta/reasoner.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "feta/errors.hpp"

namespace feta {
namespace {

using json = nlohmann::json;

// Instruction block shared verbatim by every channel agent; the prompts are
// dataset-agnostic by construction.
constexpr const char* kInstructionBlock =
    "[Instruction]\n"
    "1. Compare the unlabeled sample ONLY with the retrieved examples shown above.\n"
    "2. Focus on similarity in shape, spikes, oscillations, and recovery patterns. Ignore "
    "absolute value scale unless it clearly distinguishes classes.\n"
    "3. If the majority of the retrieved examples have the same label, prioritize that label "
    "unless the sample strongly matches another.\n"
    "4. Assign confidence based on neighbor consistency: All neighbors same label ~ 0.9; 2/3 "
    "neighbors same label ~ 0.7; Neighbors mixed evenly ~ 0.5\n"
    "5. Return ONLY one JSON object with EXACTLY these keys and no extra text.\n";

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string values_line(const std::vector<double>& values, int decimals) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_fixed(values[i], decimals);
  }
  return out;
}

void append_exemplars(std::ostringstream& out, const NeighborSet& neighbors, int decimals) {
  out << "Retrieved examples:\n";
  for (std::size_t i = 0; i < neighbors.neighbors.size(); ++i) {
    const Neighbor& n = neighbors.neighbors[i];
    out << "Example " << (i + 1) << " | label: " << n.label << " | DTW distance: ";
    if (n.distance) {
      out << format_fixed(*n.distance, decimals);
    } else {
      out << "not applicable";
    }
    out << "\n" << values_line(n.exemplar.values, decimals) << "\n";
  }
}

void append_summary(std::ostringstream& out, const NeighborSet& neighbors) {
  out << "Neighbor label summary: ";
  bool first = true;
  for (const auto& [label, count] : neighbors.summary) {
    if (!first) out << ", ";
    out << label << "=" << count;
    first = false;
  }
  out << "\n";
}

void append_response_stanza(std::ostringstream& out, const std::vector<std::string>& classes) {
  out << "[Response format]\n"
      << "{\n"
      << "    \"decision\": <one of ";
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (i > 0) out << ", ";
    out << classes[i];
  }
  out << ">,\n"
      << "    \"confidence\": <0.0 to 1.0>,\n"
      << "    \"reasoning\": \"<one short sentence>\"\n"
      << "}\n";
}

std::string trim_copy(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool iequals(const std::string& a, const std::string& b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

// First balanced top-level JSON object in the text, if any parses.
std::optional<json> first_json_object(const std::string& text) {
  for (std::size_t start = text.find('{'); start != std::string::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char ch = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (ch == '\\') {
          escaped = true;
        } else if (ch == '"') {
          in_string = false;
        }
        continue;
      }
      if (ch == '"') {
        in_string = true;
      } else if (ch == '{') {
        ++depth;
      } else if (ch == '}') {
        if (--depth == 0) {
          json parsed = json::parse(text.substr(start, i - start + 1), nullptr, false);
          if (!parsed.is_discarded() && parsed.is_object()) return parsed;
          break;
        }
      }
    }
  }
  return std::nullopt;
}

ChannelDecision invalid_decision(int channel, std::string note) {
  ChannelDecision d;
  d.channel = channel;
  d.label = std::nullopt;
  d.confidence = 0.0;
  d.rationale = std::move(note);
  d.backend = Backend::llm;
  return d;
}

}  // namespace

const char* to_string(Backend backend) {
  switch (backend) {
    case Backend::llm: return "llm";
    case Backend::mock: return "mock";
    case Backend::top1: return "top1";
  }
  return "mock";
}

std::string build_prompt(const ChannelSequence& query, const NeighborSet& neighbors,
                         const std::vector<std::string>& classes, int value_decimals) {
  if (classes.empty()) {
    throw Error(ErrorKind::empty_class_set, "build_prompt needs a non-empty class set");
  }
  if (neighbors.neighbors.empty()) {
    throw Error(ErrorKind::empty_neighbors, "build_prompt needs at least one exemplar");
  }

  std::ostringstream out;
  append_exemplars(out, neighbors, value_decimals);
  out << "\nUnlabeled sample:\n" << values_line(query.values, value_decimals) << "\n\n";
  append_summary(out, neighbors);
  out << "\n" << kInstructionBlock << "\n";
  append_response_stanza(out, classes);
  return out.str();
}

std::string build_joint_prompt(const std::vector<ChannelSequence>& queries,
                               const std::vector<NeighborSet>& neighbor_sets,
                               const std::vector<std::string>& classes, int value_decimals) {
  if (classes.empty()) {
    throw Error(ErrorKind::empty_class_set, "build_joint_prompt needs a non-empty class set");
  }
  if (queries.empty() || queries.size() != neighbor_sets.size()) {
    throw Error(ErrorKind::empty_neighbors, "build_joint_prompt needs one neighbor set per channel");
  }

  std::ostringstream out;
  out << "The following " << queries.size()
      << " channels all belong to one unlabeled multivariate sample.\n\n";
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (neighbor_sets[i].neighbors.empty()) {
      throw Error(ErrorKind::empty_neighbors,
                  "channel " + std::to_string(queries[i].channel) + " has no exemplars");
    }
    out << "=== Channel " << queries[i].channel << " ===\n";
    append_exemplars(out, neighbor_sets[i], value_decimals);
    out << "\nUnlabeled sample (channel " << queries[i].channel << "):\n"
        << values_line(queries[i].values, value_decimals) << "\n\n";
    append_summary(out, neighbor_sets[i]);
    out << "\n";
  }
  out << kInstructionBlock << "\n";
  append_response_stanza(out, classes);
  return out.str();
}

ChannelDecision parse_decision(const std::string& response,
                               const std::vector<std::string>& classes, int channel) {
  const auto object = first_json_object(response);
  if (!object) {
    return invalid_decision(channel, "no JSON object found in response");
  }
  const json& j = *object;
  if (!j.contains("decision") || !j.contains("confidence")) {
    return invalid_decision(channel, "response JSON is missing the decision or confidence key");
  }

  std::string raw_label =
      j["decision"].is_string() ? j["decision"].get<std::string>() : j["decision"].dump();
  raw_label = trim_copy(raw_label);

  const std::string* matched = nullptr;
  for (const auto& name : classes) {
    if (iequals(raw_label, name)) {
      matched = &name;
      break;
    }
  }
  if (!matched) {
    return invalid_decision(channel, "decision '" + raw_label + "' is not in the class set");
  }

  double confidence = 0.0;
  const json& c = j["confidence"];
  if (c.is_number()) {
    confidence = c.get<double>();
  } else if (c.is_string()) {
    const std::string s = trim_copy(c.get<std::string>());
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), last, confidence);
    if (ec != std::errc{} || ptr != last) {
      return invalid_decision(channel, "confidence '" + s + "' is not numeric");
    }
  } else {
    return invalid_decision(channel, "confidence has a non-numeric JSON type");
  }
  if (std::isnan(confidence)) confidence = 0.0;
  confidence = std::clamp(confidence, 0.0, 1.0);

  ChannelDecision d;
  d.channel = channel;
  d.label = *matched;
  d.confidence = confidence;
  d.backend = Backend::llm;
  if (j.contains("reasoning") && j["reasoning"].is_string()) {
    d.rationale = j["reasoning"].get<std::string>();
  }
  return d;
}

ChannelDecision mock_reason(const ChannelSequence& query, const NeighborSet& neighbors) {
  (void)query;  // the vote uses only the retrieval evidence
  if (neighbors.neighbors.empty()) {
    throw Error(ErrorKind::empty_neighbors, "mock_reason needs at least one neighbor");
  }
  const bool have_distances =
      std::all_of(neighbors.neighbors.begin(), neighbors.neighbors.end(),
                  [](const Neighbor& n) { return n.distance.has_value(); });

  std::map<std::string, double> weight;
  double total = 0.0;
  for (const Neighbor& n : neighbors.neighbors) {
    const double w = have_distances ? 1.0 / (*n.distance + 1e-6) : 1.0;
    weight[n.label] += w;
    total += w;
  }

  const std::string* best = nullptr;
  for (const auto& [label, w] : weight) {
    if (!best || w > weight[*best]) best = &label;  // map order breaks ties lexicographically
  }

  std::ostringstream rationale;
  rationale << (have_distances ? "distance-weighted vote:" : "uniform vote (no distances):");
  for (const auto& [label, w] : weight) {
    rationale << " " << label << "=" << format_fixed(w / total, 3);
  }

  ChannelDecision d;
  d.channel = static_cast<int>(neighbors.channel);
  d.label = *best;
  d.confidence = weight[*best] / total;
  d.rationale = rationale.str();
  d.backend = Backend::mock;
  return d;
}

ChannelDecision top1_reason(const NeighborSet& neighbors) {
  if (neighbors.neighbors.empty()) {
    throw Error(ErrorKind::empty_neighbors, "top1_reason needs at least one neighbor");
  }
  ChannelDecision d;
  d.channel = static_cast<int>(neighbors.channel);
  d.label = neighbors.neighbors.front().label;
  d.confidence = 1.0;
  d.rationale = "nearest exemplar label";
  d.backend = Backend::top1;
  return d;
}

}  // namespace feta
