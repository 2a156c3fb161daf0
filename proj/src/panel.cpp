#include "scengen/panel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace scengen {

std::string format_tenor(double tenor) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", tenor);
  return buf;
}

std::vector<std::string> FactorLayout::column_names() const {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(factor_count()));
  for (Index c = 0; c < currency_count(); ++c)
    for (double x : tenors_) names.push_back(currencies_[static_cast<std::size_t>(c)] + "_f_" + format_tenor(x));
  for (Index c = 1; c < currency_count(); ++c)
    names.push_back(currencies_[static_cast<std::size_t>(c)] + "_logfx");
  return names;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

} // namespace

FactorLayout load_layout_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open layout file: " + path);
  std::vector<std::string> currencies;
  std::vector<double> tenors;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) raise(Errc::BadConfig, "layout line is not key = value: " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::istringstream items(value);
    std::string item;
    if (key == "currencies") {
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (!item.empty()) currencies.push_back(item);
      }
    } else if (key == "tenors") {
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::size_t pos = 0;
        double x = std::stod(item, &pos);
        if (pos != item.size()) raise(Errc::BadConfig, "bad tenor in layout file: " + item);
        tenors.push_back(x);
      }
    } else {
      raise(Errc::BadConfig, "unknown layout key: " + key);
    }
  }
  if (currencies.empty()) raise(Errc::BadConfig, "layout file missing currencies");
  return FactorLayout(std::move(currencies), std::move(tenors));
}

HistoricalPanel load_panel(std::istream& in, const FactorLayout& layout, double delta) {
  std::string line;
  if (!std::getline(in, line)) raise(Errc::EmptyPanel, "panel CSV is empty");
  auto header = split_csv_line(line);
  if (header.empty() || trim(header[0]) != "date")
    raise(Errc::UnknownColumn, "first CSV column must be 'date'");

  const auto names = layout.column_names();
  std::map<std::string, Index> name_to_factor;
  for (Index j = 0; j < layout.factor_count(); ++j) name_to_factor[names[static_cast<std::size_t>(j)]] = j;

  // column_map[c] = factor index for CSV column c+1
  std::vector<Index> column_map;
  std::vector<bool> seen(names.size(), false);
  for (std::size_t c = 1; c < header.size(); ++c) {
    std::string name = trim(header[c]);
    auto it = name_to_factor.find(name);
    if (it == name_to_factor.end()) raise(Errc::UnknownColumn, "unknown CSV column: " + name);
    if (seen[static_cast<std::size_t>(it->second)]) raise(Errc::UnknownColumn, "duplicate CSV column: " + name);
    seen[static_cast<std::size_t>(it->second)] = true;
    column_map.push_back(it->second);
  }
  for (std::size_t j = 0; j < names.size(); ++j)
    if (!seen[j]) raise(Errc::MissingCell, "column absent from CSV: " + names[j]);

  std::vector<std::string> dates;
  std::vector<Vector> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      raise(Errc::MissingCell, "row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                                   " fields, expected " + std::to_string(header.size()));
    std::string date = trim(fields[0]);
    if (date.empty()) raise(Errc::MissingCell, "row " + std::to_string(line_no) + ": empty date");
    if (!dates.empty() && !(dates.back() < date))
      raise(Errc::NonMonotoneDates, "date out of order at row " + std::to_string(line_no) + ": " + date);
    Vector row(layout.factor_count());
    for (std::size_t c = 1; c < fields.size(); ++c) {
      std::string cell = trim(fields[c]);
      const std::string where = "row " + std::to_string(line_no) + ", column " + trim(header[c]);
      if (cell.empty()) raise(Errc::MissingCell, "empty cell at " + where);
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        raise(Errc::NonFiniteValue, "unparseable value at " + where);
      }
      if (pos != cell.size()) raise(Errc::NonFiniteValue, "unparseable value at " + where);
      if (!std::isfinite(v)) raise(Errc::NonFiniteValue, "non-finite value at " + where);
      row(column_map[c - 1]) = v;
    }
    dates.push_back(std::move(date));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) raise(Errc::EmptyPanel, "panel CSV has no data rows");

  HistoricalPanel panel{layout, std::move(dates), Matrix(static_cast<Index>(rows.size()), layout.factor_count()),
                        delta};
  for (std::size_t i = 0; i < rows.size(); ++i) panel.values.row(static_cast<Index>(i)) = rows[i].transpose();
  return panel;
}

HistoricalPanel load_panel_file(const std::string& path, const FactorLayout& layout, double delta) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open panel CSV: " + path);
  return load_panel(in, layout, delta);
}

void save_panel(const HistoricalPanel& panel, std::ostream& out) {
  out << "date";
  for (const auto& name : panel.layout.column_names()) out << ',' << name;
  out << '\n';
  char buf[40];
  for (Index i = 0; i < panel.observation_count(); ++i) {
    out << panel.dates[static_cast<std::size_t>(i)];
    for (Index j = 0; j < panel.layout.factor_count(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", panel.values(i, j));
      out << ',' << buf;
    }
    out << '\n';
  }
}

void save_panel_file(const HistoricalPanel& panel, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot write panel CSV: " + path);
  save_panel(panel, out);
}

Matrix compute_returns(const HistoricalPanel& panel) {
  const Index k = panel.observation_count();
  if (k < 2) raise(Errc::EmptyPanel, "need at least two observations to form returns");
  return panel.values.bottomRows(k - 1) - panel.values.topRows(k - 1);
}

} // namespace scengen
