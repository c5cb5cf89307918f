#include "mallows/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace mallows {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

int parse_int(const std::string& cell, const std::string& where) {
  const std::string t = trim(cell);
  if (t.empty()) throw ValidationError(where + ": empty cell");
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (errno != 0 || end == t.c_str() || *end != '\0') {
    throw ValidationError(where + ": not an integer: '" + t + "'");
  }
  return static_cast<int>(v);
}

double parse_double(const std::string& cell, const std::string& where) {
  const std::string t = trim(cell);
  if (t.empty()) throw ValidationError(where + ": empty cell");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0') {
    throw ValidationError(where + ": not a number: '" + t + "'");
  }
  return v;
}

bool is_na(const std::string& cell) {
  return cell == "NA" || cell == "na" || cell == "NaN" || cell.empty();
}

ItemCatalog catalog_from_header(const std::vector<std::string>& cells, std::size_t start,
                                const std::string& path) {
  std::vector<std::string> labels(cells.begin() + static_cast<std::ptrdiff_t>(start), cells.end());
  if (labels.empty()) throw ValidationError(path + ": header names no items");
  for (const auto& l : labels) {
    if (l.empty()) throw ValidationError(path + ": empty item label in header");
    if (l.find(' ') != std::string::npos) {
      throw ValidationError(path + ": item label contains a space: '" + l + "'");
    }
  }
  return ItemCatalog(labels);
}

}  // namespace

RankMatrixData load_rank_matrix(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ValidationError(path + ": empty file");
  RankMatrixData out;
  out.items = catalog_from_header(split_csv(lines[0]), 0, path);
  const int n = out.items.size();
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (trim(lines[row]).empty()) continue;
    const auto cells = split_csv(lines[row]);
    const std::string where = path + " row " + std::to_string(row);
    if (static_cast<int>(cells.size()) != n) {
      throw ValidationError(where + ": expected " + std::to_string(n) + " cells, found " +
                            std::to_string(cells.size()));
    }
    std::vector<int> entries(static_cast<std::size_t>(n), PartialRanking::kMissing);
    for (int i = 0; i < n; ++i) {
      const auto& cell = cells[static_cast<std::size_t>(i)];
      if (is_na(cell)) continue;
      entries[static_cast<std::size_t>(i)] = parse_int(cell, where);
    }
    try {
      out.rows.emplace_back(std::move(entries));
    } catch (const ValidationError& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (out.rows.empty()) throw ValidationError(path + ": no assessor rows");
  return out;
}

std::vector<Ranking> complete_rows(const std::vector<PartialRanking>& rows) {
  std::vector<Ranking> out;
  out.reserve(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (!rows[j].complete()) {
      throw ValidationError("row " + std::to_string(j + 1) + " has missing ranks");
    }
    out.push_back(Ranking::unchecked(rows[j].entries()));
  }
  return out;
}

void save_rank_matrix(const std::string& path, const std::vector<Ranking>& rows,
                      const ItemCatalog& items) {
  std::ofstream outf(path);
  if (!outf) throw ValidationError("cannot write " + path);
  for (int i = 0; i < items.size(); ++i) outf << (i ? "," : "") << items.label(i);
  outf << "\n";
  for (const auto& r : rows) {
    if (r.size() != items.size()) throw ValidationError("ranking length does not match catalog");
    for (int i = 0; i < r.size(); ++i) outf << (i ? "," : "") << r.rank_of(i);
    outf << "\n";
  }
}

namespace {

PreferenceData build_preferences(const std::string& path, const ItemCatalog* fixed_items) {
  const auto lines = read_lines(path);
  PreferenceData out;
  std::vector<std::tuple<int, std::string, std::string>> raw;
  std::size_t first = 0;
  if (!lines.empty()) {
    const auto head = split_csv(lines[0]);
    if (head.size() == 3 && head[0] == "assessor" && head[1] == "less_preferred" &&
        head[2] == "more_preferred") {
      first = 1;
    }
  }
  for (std::size_t row = first; row < lines.size(); ++row) {
    if (trim(lines[row]).empty()) continue;
    const auto cells = split_csv(lines[row]);
    const std::string where = path + " row " + std::to_string(row + 1);
    if (cells.size() != 3) throw ValidationError(where + ": expected assessor,less_preferred,more_preferred");
    raw.emplace_back(parse_int(cells[0], where), cells[1], cells[2]);
  }
  if (fixed_items) {
    out.items = *fixed_items;
  } else {
    std::set<std::string> labels;
    for (const auto& [id, lo, hi] : raw) {
      labels.insert(lo);
      labels.insert(hi);
    }
    out.items = ItemCatalog(std::vector<std::string>(labels.begin(), labels.end()));
  }
  std::map<int, std::vector<PreferencePair>> grouped;
  for (const auto& [id, lo, hi] : raw) {
    if (lo == hi) {
      throw ValidationError(path + ": assessor " + std::to_string(id) + " prefers '" + lo +
                            "' to itself");
    }
    grouped[id].push_back({out.items.index_of(lo), out.items.index_of(hi)});
  }
  for (auto& [id, pairs] : grouped) {
    out.assessors.emplace_back(out.items.size(), std::move(pairs), id);
  }
  return out;
}

}  // namespace

PreferenceData load_preferences(const std::string& path) { return build_preferences(path, nullptr); }

PreferenceData load_preferences(const std::string& path, const ItemCatalog& items) {
  return build_preferences(path, &items);
}

TimedRankData load_timed_ranks(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ValidationError(path + ": empty file");
  const auto head = split_csv(lines[0]);
  if (head.empty() || head[0] != "t") {
    throw ValidationError(path + ": first header column must be 't'");
  }
  TimedRankData out;
  out.items = catalog_from_header(head, 1, path);
  const int n = out.items.size();

  std::map<int, std::vector<TimedObservation>> by_t;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (trim(lines[row]).empty()) continue;
    const auto cells = split_csv(lines[row]);
    const std::string where = path + " row " + std::to_string(row);
    if (static_cast<int>(cells.size()) != n + 1) {
      throw ValidationError(where + ": expected " + std::to_string(n + 1) + " cells, found " +
                            std::to_string(cells.size()));
    }
    const int t = parse_int(cells[0], where);
    std::vector<int> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto& cell = cells[static_cast<std::size_t>(i + 1)];
      if (is_na(cell)) throw ValidationError(where + ": NA not allowed in timed data");
      values[static_cast<std::size_t>(i)] = parse_int(cell, where);
      if (values[static_cast<std::size_t>(i)] < 1) {
        throw ValidationError(where + ": rank values must be positive, found " +
                              std::to_string(values[static_cast<std::size_t>(i)]));
      }
    }
    if (is_permutation_vector(values)) {
      by_t[t].emplace_back(Ranking::unchecked(std::move(values)));
    } else {
      // repeated values encode a weak order: group items by ascending value
      std::map<int, std::vector<int>> groups;
      for (int i = 0; i < n; ++i) groups[values[static_cast<std::size_t>(i)]].push_back(i);
      std::vector<std::vector<int>> ordered;
      ordered.reserve(groups.size());
      for (auto& [v, g] : groups) ordered.push_back(std::move(g));
      by_t[t].emplace_back(TieSet(n, std::move(ordered)));
    }
  }
  if (by_t.empty()) throw ValidationError(path + ": no observation rows");
  const int t_min = by_t.begin()->first;
  const int t_max = by_t.rbegin()->first;
  out.data.slices.resize(static_cast<std::size_t>(t_max - t_min) + 1);
  for (auto& [t, slice] : by_t) {
    out.data.slices[static_cast<std::size_t>(t - t_min)] = std::move(slice);
  }
  return out;
}

ItemCatalog load_item_list(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<std::string> labels;
  for (const auto& line : lines) {
    for (const auto& cell : split_csv(line)) {
      if (!cell.empty()) labels.push_back(cell);
    }
  }
  if (labels.empty()) throw ValidationError(path + ": no item labels");
  return ItemCatalog(labels);
}

std::vector<int> load_labels(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<int> out;
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const std::string t = trim(lines[row]);
    if (t.empty()) continue;
    if (row == 0 && t == "label") continue;
    out.push_back(parse_int(t, path + " row " + std::to_string(row + 1)));
  }
  if (out.empty()) throw ValidationError(path + ": no labels");
  return out;
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

namespace {

void write_header(std::ofstream& out, const std::string& kind,
                  const std::map<std::string, std::string>& fixed,
                  const std::map<std::string, std::string>& meta, const ItemCatalog& items,
                  const std::string& columns) {
  out << "kind=" << kind << "\n";
  for (const auto& [k, v] : fixed) out << k << "=" << v << "\n";
  for (const auto& [k, v] : meta) {
    if (k == "kind" || k == "items" || k == "columns" || fixed.count(k)) continue;
    out << k << "=" << v << "\n";
  }
  out << "items=";
  for (int i = 0; i < items.size(); ++i) out << (i ? " " : "") << items.label(i);
  out << "\n";
  out << "columns=" << columns << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  return out;
}

}  // namespace

void save_static_samples(const std::string& path, const PosteriorSamples& samples,
                         const ItemCatalog& items, const std::map<std::string, std::string>& meta) {
  auto out = open_out(path);
  const int n = items.size();
  std::string columns = "iteration alpha";
  for (int i = 0; i < n; ++i) columns += " rho:" + items.label(i);
  write_header(out, "static", {{"n", std::to_string(n)}, {"draws", std::to_string(samples.size())}},
               meta, items, columns);
  for (std::size_t t = 0; t < samples.size(); ++t) {
    out << samples.iteration[t] << " " << format_double(samples.alpha[t]);
    for (int i = 0; i < n; ++i) out << " " << samples.rho[t].rank_of(i);
    out << "\n";
  }
}

void save_augmented_samples(const std::string& path, const std::vector<long>& iterations,
                            const std::vector<std::vector<Ranking>>& augmented,
                            const ItemCatalog& items,
                            const std::map<std::string, std::string>& meta) {
  if (iterations.size() != augmented.size()) {
    throw ValidationError("iteration list does not match augmented draws");
  }
  auto out = open_out(path);
  const int n = items.size();
  const int N = augmented.empty() ? 0 : static_cast<int>(augmented.front().size());
  std::string columns = "iteration assessor";
  for (int i = 0; i < n; ++i) columns += " rho:" + items.label(i);
  write_header(out, "augmented",
               {{"n", std::to_string(n)},
                {"assessors", std::to_string(N)},
                {"draws", std::to_string(augmented.size())}},
               meta, items, columns);
  for (std::size_t t = 0; t < augmented.size(); ++t) {
    for (int j = 0; j < N; ++j) {
      out << iterations[t] << " " << (j + 1);
      for (int i = 0; i < n; ++i) out << " " << augmented[t][static_cast<std::size_t>(j)].rank_of(i);
      out << "\n";
    }
  }
}

void save_mixture_samples(const std::string& path, const MixtureSamples& samples,
                          const ItemCatalog& items, const std::map<std::string, std::string>& meta) {
  auto out = open_out(path);
  const int n = items.size();
  const int C = samples.C;
  const int N = samples.N;
  std::string columns = "iteration";
  for (int c = 1; c <= C; ++c) columns += " alpha:" + std::to_string(c);
  for (int c = 1; c <= C; ++c) columns += " tau:" + std::to_string(c);
  for (int c = 1; c <= C; ++c) {
    for (int i = 0; i < n; ++i) columns += " rho:" + std::to_string(c) + ":" + items.label(i);
  }
  for (int j = 1; j <= N; ++j) columns += " z:" + std::to_string(j);
  write_header(out, "mixture",
               {{"C", std::to_string(C)},
                {"N", std::to_string(N)},
                {"n", std::to_string(n)},
                {"draws", std::to_string(samples.size())}},
               meta, items, columns);
  for (std::size_t t = 0; t < samples.size(); ++t) {
    out << samples.iteration[t];
    for (int c = 0; c < C; ++c) out << " " << format_double(samples.alpha[t][static_cast<std::size_t>(c)]);
    for (int c = 0; c < C; ++c) out << " " << format_double(samples.tau[t][static_cast<std::size_t>(c)]);
    for (int c = 0; c < C; ++c) {
      for (int i = 0; i < n; ++i) out << " " << samples.rho[t][static_cast<std::size_t>(c)].rank_of(i);
    }
    for (int j = 0; j < N; ++j) out << " " << (samples.z[t][static_cast<std::size_t>(j)] + 1);
    out << "\n";
  }
}

void save_dynamic_samples(const std::string& path, const DynamicSamples& samples,
                          const ItemCatalog& items, const std::map<std::string, std::string>& meta) {
  auto out = open_out(path);
  const int n = items.size();
  const int T = samples.T;
  std::string columns = "iteration beta sigma_alpha_sq";
  for (int t = 0; t <= T; ++t) columns += " alpha:" + std::to_string(t);
  for (int t = 0; t <= T; ++t) {
    for (int i = 0; i < n; ++i) columns += " rho:" + std::to_string(t) + ":" + items.label(i);
  }
  write_header(out, "dynamic",
               {{"T", std::to_string(T)},
                {"n", std::to_string(n)},
                {"draws", std::to_string(samples.size())}},
               meta, items, columns);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    out << samples.iteration[k] << " " << format_double(samples.beta[k]) << " "
        << format_double(samples.sigma_alpha_sq[k]);
    for (int t = 0; t <= T; ++t) out << " " << format_double(samples.alpha[k][static_cast<std::size_t>(t)]);
    for (int t = 0; t <= T; ++t) {
      for (int i = 0; i < n; ++i) out << " " << samples.rho[k][static_cast<std::size_t>(t)].rank_of(i);
    }
    out << "\n";
  }
}

namespace {

struct ParsedSampleFile {
  std::map<std::string, std::string> header;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

ParsedSampleFile parse_sample_file(const std::string& path) {
  ParsedSampleFile out;
  const auto lines = read_lines(path);
  std::size_t row = 0;
  bool saw_columns = false;
  for (; row < lines.size(); ++row) {
    const auto pos = lines[row].find('=');
    if (pos == std::string::npos) break;
    const std::string key = lines[row].substr(0, pos);
    const std::string value = lines[row].substr(pos + 1);
    if (key == "columns") {
      std::stringstream ss(value);
      std::string col;
      while (ss >> col) out.columns.push_back(col);
      saw_columns = true;
      ++row;
      break;
    }
    out.header[key] = value;
  }
  if (!saw_columns) throw ValidationError(path + ": missing columns= header line");
  for (; row < lines.size(); ++row) {
    if (trim(lines[row]).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(lines[row]);
    std::string cell;
    while (ss >> cell) cells.push_back(cell);
    if (cells.size() != out.columns.size()) {
      throw ValidationError(path + " row " + std::to_string(row + 1) + ": expected " +
                            std::to_string(out.columns.size()) + " fields, found " +
                            std::to_string(cells.size()));
    }
    out.rows.push_back(std::move(cells));
  }
  return out;
}

int header_int(const ParsedSampleFile& f, const std::string& key, const std::string& path) {
  auto it = f.header.find(key);
  if (it == f.header.end()) throw ValidationError(path + ": missing header key " + key);
  return parse_int(it->second, path + " header " + key);
}

ItemCatalog header_items(const ParsedSampleFile& f, const std::string& path) {
  auto it = f.header.find("items");
  if (it == f.header.end()) throw ValidationError(path + ": missing items= header line");
  std::vector<std::string> labels;
  std::stringstream ss(it->second);
  std::string label;
  while (ss >> label) labels.push_back(label);
  return ItemCatalog(labels);
}

Ranking row_ranking(const std::vector<std::string>& cells, std::size_t offset, int n,
                    const std::string& where) {
  std::vector<int> ranks(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ranks[static_cast<std::size_t>(i)] = parse_int(cells[offset + static_cast<std::size_t>(i)], where);
  }
  if (!is_permutation_vector(ranks)) throw ValidationError(where + ": stored ranks are not a permutation");
  return Ranking::unchecked(std::move(ranks));
}

}  // namespace

SampleFile load_samples(const std::string& path) {
  ParsedSampleFile f = parse_sample_file(path);
  auto kind_it = f.header.find("kind");
  if (kind_it == f.header.end()) throw ValidationError(path + ": missing kind= header line");
  SampleFile out;
  out.kind = kind_it->second;
  out.meta = f.header;
  out.items = header_items(f, path);
  const int n = header_int(f, "n", path);
  if (n != out.items.size()) throw ValidationError(path + ": n does not match the item list");

  if (out.kind == "static") {
    if (f.columns.size() != 2 + static_cast<std::size_t>(n)) {
      throw ValidationError(path + ": column count does not match n");
    }
    for (std::size_t r = 0; r < f.rows.size(); ++r) {
      const std::string where = path + " data row " + std::to_string(r + 1);
      out.static_samples.iteration.push_back(parse_int(f.rows[r][0], where));
      out.static_samples.alpha.push_back(parse_double(f.rows[r][1], where));
      out.static_samples.rho.push_back(row_ranking(f.rows[r], 2, n, where));
    }
  } else if (out.kind == "augmented") {
    const int N = header_int(f, "assessors", path);
    long current_iter = 0;
    for (std::size_t r = 0; r < f.rows.size(); ++r) {
      const std::string where = path + " data row " + std::to_string(r + 1);
      const long iter = parse_int(f.rows[r][0], where);
      const int assessor = parse_int(f.rows[r][1], where);
      if (assessor < 1 || assessor > N) throw ValidationError(where + ": assessor out of range");
      if (assessor == 1) {
        out.augmented_iterations.push_back(iter);
        out.augmented.emplace_back();
        current_iter = iter;
      } else if (iter != current_iter) {
        throw ValidationError(where + ": assessor block broken across iterations");
      }
      out.augmented.back().push_back(row_ranking(f.rows[r], 2, n, where));
    }
    for (const auto& draw : out.augmented) {
      if (static_cast<int>(draw.size()) != N) {
        throw ValidationError(path + ": incomplete assessor block");
      }
    }
  } else if (out.kind == "mixture") {
    const int C = header_int(f, "C", path);
    const int N = header_int(f, "N", path);
    out.mixture_samples.C = C;
    out.mixture_samples.N = N;
    const std::size_t expect = 1 + 2 * static_cast<std::size_t>(C) +
                               static_cast<std::size_t>(C) * static_cast<std::size_t>(n) +
                               static_cast<std::size_t>(N);
    if (f.columns.size() != expect) throw ValidationError(path + ": column count does not match C/N/n");
    for (std::size_t r = 0; r < f.rows.size(); ++r) {
      const std::string where = path + " data row " + std::to_string(r + 1);
      const auto& cells = f.rows[r];
      std::size_t k = 0;
      out.mixture_samples.iteration.push_back(parse_int(cells[k++], where));
      std::vector<double> alpha(static_cast<std::size_t>(C));
      for (int c = 0; c < C; ++c) alpha[static_cast<std::size_t>(c)] = parse_double(cells[k++], where);
      std::vector<double> tau(static_cast<std::size_t>(C));
      for (int c = 0; c < C; ++c) tau[static_cast<std::size_t>(c)] = parse_double(cells[k++], where);
      std::vector<Ranking> rho;
      rho.reserve(static_cast<std::size_t>(C));
      for (int c = 0; c < C; ++c) {
        rho.push_back(row_ranking(cells, k, n, where));
        k += static_cast<std::size_t>(n);
      }
      std::vector<int> z(static_cast<std::size_t>(N));
      for (int j = 0; j < N; ++j) {
        const int label = parse_int(cells[k++], where);
        if (label < 1 || label > C) throw ValidationError(where + ": cluster label out of range");
        z[static_cast<std::size_t>(j)] = label - 1;
      }
      out.mixture_samples.alpha.push_back(std::move(alpha));
      out.mixture_samples.tau.push_back(std::move(tau));
      out.mixture_samples.rho.push_back(std::move(rho));
      out.mixture_samples.z.push_back(std::move(z));
    }
  } else if (out.kind == "dynamic") {
    const int T = header_int(f, "T", path);
    out.dynamic_samples.T = T;
    const std::size_t expect = 3 + static_cast<std::size_t>(T + 1) +
                               static_cast<std::size_t>(T + 1) * static_cast<std::size_t>(n);
    if (f.columns.size() != expect) throw ValidationError(path + ": column count does not match T/n");
    for (std::size_t r = 0; r < f.rows.size(); ++r) {
      const std::string where = path + " data row " + std::to_string(r + 1);
      const auto& cells = f.rows[r];
      std::size_t k = 0;
      out.dynamic_samples.iteration.push_back(parse_int(cells[k++], where));
      out.dynamic_samples.beta.push_back(parse_double(cells[k++], where));
      out.dynamic_samples.sigma_alpha_sq.push_back(parse_double(cells[k++], where));
      std::vector<double> alpha(static_cast<std::size_t>(T) + 1);
      for (int t = 0; t <= T; ++t) alpha[static_cast<std::size_t>(t)] = parse_double(cells[k++], where);
      std::vector<Ranking> rho;
      rho.reserve(static_cast<std::size_t>(T) + 1);
      for (int t = 0; t <= T; ++t) {
        rho.push_back(row_ranking(cells, k, n, where));
        k += static_cast<std::size_t>(n);
      }
      out.dynamic_samples.alpha.push_back(std::move(alpha));
      out.dynamic_samples.rho.push_back(std::move(rho));
    }
  } else {
    throw ValidationError(path + ": unknown sample kind '" + out.kind + "'");
  }
  return out;
}

void save_partition_table(const std::string& path, const LogPartitionTable& table) {
  nlohmann::json j;
  j["n"] = table.n;
  j["metric"] = to_string(table.metric);
  j["method"] = to_string(table.method);
  j["grid"]["alpha"] = table.alpha;
  j["grid"]["log_z"] = table.log_z;
  j["poly"] = table.poly;
  j["fit_residual"] = table.fit_residual;
  j["sample_count"] = table.sample_count;
  j["seed"] = table.seed;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

LogPartitionTable load_partition_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  LogPartitionTable table;
  try {
    table.n = j.at("n").get<int>();
    table.metric = metric_from_string(j.at("metric").get<std::string>());
    table.method = partition_method_from_string(j.at("method").get<std::string>());
    table.alpha = j.at("grid").at("alpha").get<std::vector<double>>();
    table.log_z = j.at("grid").at("log_z").get<std::vector<double>>();
    table.poly = j.at("poly").get<std::vector<double>>();
    table.fit_residual = j.at("fit_residual").get<double>();
    table.sample_count = j.at("sample_count").get<long long>();
    table.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  table.validate();
  return table;
}

void save_manifest(const std::string& path, const std::string& command,
                   const std::map<std::string, std::string>& config,
                   const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config;
  j["outputs"] = outputs;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  Manifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return m;
}

}  // namespace mallows
