#include "feta/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include "feta/errors.hpp"

namespace feta {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(s.substr(start));
      return fields;
    }
    fields.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_bool(std::string_view token) { return lower(trim(token)) == "true"; }

double parse_value(std::string_view token, std::size_t line_no) {
  token = trim(token);
  if (token.empty()) {
    throw Error(ErrorKind::non_numeric_value, "empty value on line " + std::to_string(line_no));
  }
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw Error(ErrorKind::non_numeric_value,
                "cannot parse '" + std::string(token) + "' on line " + std::to_string(line_no));
  }
  return value;
}

std::size_t parse_count(std::string_view token, std::string_view directive) {
  token = trim(token);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw Error(ErrorKind::malformed_header,
                "bad " + std::string(directive) + " value '" + std::string(token) + "'");
  }
  return value;
}

// Shortest decimal form that parses back to the same double.
std::string format_value(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::vector<std::string> DatasetHalf::class_set() const {
  std::set<std::string> names;
  if (!declared_classes.empty()) {
    names.insert(declared_classes.begin(), declared_classes.end());
  } else {
    for (const auto& s : series) {
      if (s.label) names.insert(*s.label);
    }
  }
  return {names.begin(), names.end()};
}

DatasetHalf parse_ts_text(const std::string& text) {
  DatasetHalf half;
  std::optional<std::size_t> declared_dims;
  std::optional<std::size_t> expected_channels;
  bool in_data = false;

  std::size_t line_no = 0;
  std::string_view rest(text);
  while (!rest.empty()) {
    std::size_t eol = rest.find('\n');
    std::string_view raw = rest.substr(0, eol);
    rest = (eol == std::string_view::npos) ? std::string_view{} : rest.substr(eol + 1);
    ++line_no;

    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (!in_data) {
      if (line.front() != '@') {
        throw Error(ErrorKind::malformed_header,
                    "expected header directive on line " + std::to_string(line_no));
      }
      std::size_t sp = line.find_first_of(" \t");
      std::string keyword = lower(line.substr(0, sp));
      std::string_view value = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));

      if (keyword == "@data") {
        in_data = true;
      } else if (keyword == "@problemname") {
        half.problem_name = std::string(value);
      } else if (keyword == "@classlabel") {
        std::vector<std::string_view> tokens = split(value, ' ');
        half.has_labels = !tokens.empty() && parse_bool(tokens.front());
        for (std::size_t i = 1; i < tokens.size(); ++i) {
          std::string_view tok = trim(tokens[i]);
          if (!tok.empty()) half.declared_classes.emplace_back(tok);
        }
      } else if (keyword == "@dimensions") {
        declared_dims = parse_count(value, "@dimensions");
      } else if (keyword == "@serieslength") {
        half.declared_length = parse_count(value, "@seriesLength");
      } else if (keyword == "@timestamps") {
        if (parse_bool(value)) {
          throw Error(ErrorKind::malformed_header, "timestamped .ts variants are not supported");
        }
      }
      // @univariate, @equalLength, @missing and unknown directives carry no
      // information we need beyond what the data lines themselves provide.
      continue;
    }

    std::vector<std::string_view> fields = split(line, ':');
    std::optional<std::string> label;
    if (half.has_labels) {
      if (fields.size() < 2) {
        throw Error(ErrorKind::missing_label, "no label field on line " + std::to_string(line_no));
      }
      std::string_view tok = trim(fields.back());
      if (tok.empty()) {
        throw Error(ErrorKind::missing_label, "empty label on line " + std::to_string(line_no));
      }
      label = std::string(tok);
      if (!half.declared_classes.empty() &&
          std::find(half.declared_classes.begin(), half.declared_classes.end(), *label) ==
              half.declared_classes.end()) {
        throw Error(ErrorKind::missing_label,
                    "label '" + *label + "' on line " + std::to_string(line_no) +
                        " is not in the declared class set");
      }
      fields.pop_back();
    }

    if (declared_dims && fields.size() != *declared_dims) {
      throw Error(ErrorKind::dimension_mismatch,
                  "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " channels, header declares " + std::to_string(*declared_dims));
    }
    if (expected_channels && fields.size() != *expected_channels) {
      throw Error(ErrorKind::dimension_mismatch,
                  "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " channels, previous lines have " + std::to_string(*expected_channels));
    }
    expected_channels = fields.size();

    LabeledSeries series;
    series.series_id = half.series.size();
    series.label = std::move(label);
    series.values.reserve(fields.size());
    for (std::string_view field : fields) {
      std::vector<double> channel;
      for (std::string_view token : split(field, ',')) {
        channel.push_back(parse_value(token, line_no));
      }
      if (channel.empty()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "empty channel on line " + std::to_string(line_no));
      }
      if (!series.values.empty() && channel.size() != series.values.front().size()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "unequal channel lengths within series on line " + std::to_string(line_no));
      }
      series.values.push_back(std::move(channel));
    }
    half.series.push_back(std::move(series));
  }

  if (!in_data) {
    throw Error(ErrorKind::malformed_header, "missing @data directive");
  }
  return half;
}

Dataset make_dataset(const std::string& name, const DatasetHalf& train, const DatasetHalf& test) {
  Dataset ds;
  ds.name = name;

  std::size_t train_channels = train.series.empty() ? 0 : train.series.front().channel_count();
  std::size_t test_channels = test.series.empty() ? train_channels : test.series.front().channel_count();
  if (!train.series.empty() && !test.series.empty() && train_channels != test_channels) {
    throw Error(ErrorKind::inconsistent_splits,
                "train has " + std::to_string(train_channels) + " channels, test has " +
                    std::to_string(test_channels));
  }
  ds.channel_count = train_channels;

  std::vector<std::string> train_classes = train.class_set();
  std::vector<std::string> test_classes = test.class_set();
  if (!train_classes.empty() && !test_classes.empty() && train_classes != test_classes) {
    throw Error(ErrorKind::inconsistent_splits, "train and test class sets differ");
  }
  ds.classes = train_classes.empty() ? test_classes : train_classes;

  ds.train = train.series;
  ds.test = test.series;

  std::optional<std::size_t> uniform;
  bool variable = false;
  for (const auto* split : {&ds.train, &ds.test}) {
    for (const auto& s : *split) {
      if (!uniform) {
        uniform = s.length();
      } else if (*uniform != s.length()) {
        variable = true;
      }
    }
  }
  ds.declared_length = variable ? std::nullopt : uniform;
  return ds;
}

Dataset load_split(const std::filesystem::path& root, const std::string& name) {
  auto read_file = [](const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      throw Error(ErrorKind::file_not_found, path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };

  const std::filesystem::path dir = root / name;
  DatasetHalf train = parse_ts_text(read_file(dir / (name + "_TRAIN.ts")));
  DatasetHalf test = parse_ts_text(read_file(dir / (name + "_TEST.ts")));
  return make_dataset(name, train, test);
}

std::string to_ts_text(const Dataset& dataset, Split split) {
  const std::vector<LabeledSeries>& series = split == Split::train ? dataset.train : dataset.test;
  const bool labeled = !dataset.classes.empty();

  std::ostringstream out;
  out << "@problemName " << dataset.name << "\n";
  out << "@timeStamps false\n";
  out << "@missing false\n";
  out << "@univariate " << (dataset.channel_count == 1 ? "true" : "false") << "\n";
  out << "@dimensions " << dataset.channel_count << "\n";
  out << "@equalLength " << (dataset.declared_length ? "true" : "false") << "\n";
  if (dataset.declared_length) {
    out << "@seriesLength " << *dataset.declared_length << "\n";
  }
  out << "@classLabel " << (labeled ? "true" : "false");
  for (const auto& name : dataset.classes) out << ' ' << name;
  out << "\n@data\n";

  for (const auto& s : series) {
    for (std::size_t c = 0; c < s.values.size(); ++c) {
      if (c > 0) out << ':';
      const auto& channel = s.values[c];
      for (std::size_t t = 0; t < channel.size(); ++t) {
        if (t > 0) out << ',';
        out << format_value(channel[t]);
      }
    }
    if (labeled && s.label) out << ':' << *s.label;
    out << "\n";
  }
  return out.str();
}

}  // namespace feta
