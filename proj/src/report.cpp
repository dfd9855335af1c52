#include "gammak/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace gammak {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string clean(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '"', '\'');
  return s;
}

std::string ratio_field(double v, bool defined) { return defined ? format_number(v) : "undefined"; }

}  // namespace

std::string main_csv_header() {
  return "function_id,r,p,alpha,t,omega_main,tail_zero,tail_infinity,omega_complete,"
         "k_restricted,k_full,ratio14,ratio_equiv,ratio_full,status\n";
}

std::string main_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << main_csv_header();
  for (const auto& r : rep.rows) {
    const auto& m = r.modulus;
    os << r.function_id << ',' << r.r << ',' << r.p.str() << ',' << format_number(r.alpha) << ','
       << format_number(r.t) << ',' << format_number(m.omega_main) << ','
       << format_number(m.tail_zero) << ',' << format_number(m.tail_infinity) << ','
       << format_number(m.omega_complete) << ',' << format_number(r.k_restricted.value) << ','
       << format_number(r.k_full.value) << ',' << ratio_field(r.ratio14, r.ratio14_defined) << ','
       << (r.r == 1 ? ratio_field(r.ratio_equiv, r.ratio_equiv_defined) : "") << ','
       << ratio_field(r.ratio_full, r.ratio_full_defined) << ',' << clean(r.status) << '\n';
  }
  return os.str();
}

std::string k_csv_header() {
  return "function_id,variant,r,p,alpha,t,value,approx_error_term,seminorm_term,candidate_id,status\n";
}

std::string k_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << k_csv_header();
  for (const auto& r : rep.rows) {
    for (const KEstimate* k : {&r.k_restricted, &r.k_full}) {
      os << r.function_id << ',' << to_string(k == &r.k_restricted ? KVariant::restricted : KVariant::full)
         << ',' << r.r << ',' << r.p.str() << ',' << format_number(r.alpha) << ','
         << format_number(r.t) << ',' << format_number(k->value) << ','
         << format_number(k->approx_error_term) << ',' << format_number(k->seminorm_term) << ','
         << (k->candidate_id.empty() ? "none" : k->candidate_id) << ',' << clean(r.status) << '\n';
    }
  }
  return os.str();
}

std::string summary_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << "function_id,r,p,alpha,ratio,defined,min,max,spread,growth,kind\n";
  for (const auto& s : rep.summary)
    os << s.function_id << ',' << s.r << ',' << s.p.str() << ',' << format_number(s.alpha) << ','
       << s.ratio << ',' << s.defined << ',' << format_number(s.min) << ','
       << format_number(s.max) << ',' << format_number(s.spread) << ','
       << format_number(s.growth) << ',' << s.kind << '\n';
  return os.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    rows.push_back(std::move(f));
  }
  return rows;
}

namespace {

struct Series {
  std::vector<double> t, omega, omega_c, k;
};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else if (c == '"') o += "&quot;";
    else o += c;
  }
  return o;
}

double to_num(const std::string& s) {
  try {
    return std::stod(s);
  } catch (...) {
    return std::nan("");
  }
}

}  // namespace

std::string svg_from_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  std::vector<std::string> order;
  std::map<std::string, Series> groups;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() < 10) continue;
    const std::string key = f[0] + " r=" + f[1] + " p=" + f[2] + " a=" + f[3];
    if (!groups.count(key)) order.push_back(key);
    auto& s = groups[key];
    s.t.push_back(to_num(f[4]));
    s.omega.push_back(to_num(f[5]));
    s.omega_c.push_back(to_num(f[8]));
    s.k.push_back(to_num(f[9]));
  }

  const int cols = 4, pw = 300, ph = 220, pad = 40;
  const int nrows = std::max<int>(1, (static_cast<int>(order.size()) + cols - 1) / cols);
  const int W = cols * pw, H = nrows * ph + 30;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"10\" y=\"18\" font-size=\"12\">log-log: omega_main (blue), omega_complete "
        "(green), restricted K bound (red) against t</text>\n";
  const char* colors[3] = {"#1f77b4", "#2ca02c", "#d62728"};
  for (std::size_t gi = 0; gi < order.size(); ++gi) {
    const auto& s = groups[order[gi]];
    const int ox = static_cast<int>(gi % cols) * pw, oy = 30 + static_cast<int>(gi / cols) * ph;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    const std::vector<double>* ys[3] = {&s.omega, &s.omega_c, &s.k};
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (!(s.t[i] > 0)) continue;
      xmin = std::min(xmin, std::log10(s.t[i]));
      xmax = std::max(xmax, std::log10(s.t[i]));
      for (auto* y : ys)
        if ((*y)[i] > 0 && std::isfinite((*y)[i])) {
          ymin = std::min(ymin, std::log10((*y)[i]));
          ymax = std::max(ymax, std::log10((*y)[i]));
        }
    }
    os << "<g transform=\"translate(" << ox << ',' << oy << ")\">\n";
    os << "<rect x=\"" << pad << "\" y=\"10\" width=\"" << pw - pad - 10 << "\" height=\""
       << ph - pad - 20 << "\" fill=\"none\" stroke=\"#888\"/>\n";
    os << "<text x=\"" << pad << "\" y=\"8\">" << esc(order[gi]) << "</text>\n";
    if (xmax > xmin - 1e-300 && ymax >= ymin) {
      if (xmax - xmin < 1e-12) xmax = xmin + 1;
      if (ymax - ymin < 1e-12) ymax = ymin + 1;
      auto X = [&](double lx) { return pad + (lx - xmin) / (xmax - xmin) * (pw - pad - 10); };
      auto Y = [&](double ly) { return 10 + (ymax - ly) / (ymax - ymin) * (ph - pad - 20); };
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2g", ymax);
      os << "<text x=\"2\" y=\"18\">1e" << buf << "</text>\n";
      std::snprintf(buf, sizeof buf, "%.2g", ymin);
      os << "<text x=\"2\" y=\"" << ph - pad - 10 << "\">1e" << buf << "</text>\n";
      std::snprintf(buf, sizeof buf, "%.3g", std::pow(10.0, xmin));
      os << "<text x=\"" << pad << "\" y=\"" << ph - pad + 2 << "\">" << buf << "</text>\n";
      std::snprintf(buf, sizeof buf, "%.3g", std::pow(10.0, xmax));
      os << "<text x=\"" << pw - 60 << "\" y=\"" << ph - pad + 2 << "\">" << buf << "</text>\n";
      for (int c = 0; c < 3; ++c) {
        std::ostringstream pts;
        int n = 0;
        for (std::size_t i = 0; i < s.t.size(); ++i) {
          const double y = (*ys[c])[i];
          if (!(s.t[i] > 0) || !(y > 0) || !std::isfinite(y)) continue;
          pts << (n++ ? " " : "") << X(std::log10(s.t[i])) << ',' << Y(std::log10(y));
        }
        if (n > 0)
          os << "<polyline fill=\"none\" stroke=\"" << colors[c] << "\" stroke-width=\"1.5\" points=\""
             << pts.str() << "\"/>\n";
      }
    } else {
      os << "<text x=\"" << pad + 10 << "\" y=\"" << ph / 2 << "\">no positive values</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

bool well_formed_xml(const std::string& s, std::string* error) {
  auto fail = [&](const std::string& m) {
    if (error) *error = m;
    return false;
  };
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while (i < s.size()) {
    if (s[i] != '<') {
      if (s[i] == '&') {
        const auto semi = s.find(';', i);
        if (semi == std::string::npos || semi - i > 8) return fail("bare '&' in text");
      }
      if (stack.empty() && !std::isspace(static_cast<unsigned char>(s[i])))
        return fail("text outside the root element");
      ++i;
      continue;
    }
    const auto close = s.find('>', i);
    if (close == std::string::npos) return fail("unterminated tag");
    std::string tag = s.substr(i + 1, close - i - 1);
    i = close + 1;
    if (tag.empty()) return fail("empty tag");
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return fail("mismatched closing tag </" + name + ">");
      stack.pop_back();
      continue;
    }
    const bool self = tag.back() == '/';
    if (self) tag.pop_back();
    std::size_t k = 0;
    while (k < tag.size() && !std::isspace(static_cast<unsigned char>(tag[k]))) ++k;
    const std::string name = tag.substr(0, k);
    if (name.empty()) return fail("tag without a name");
    // attributes: name="value"
    while (k < tag.size()) {
      while (k < tag.size() && std::isspace(static_cast<unsigned char>(tag[k]))) ++k;
      if (k >= tag.size()) break;
      const auto eq = tag.find('=', k);
      if (eq == std::string::npos || eq + 1 >= tag.size() || tag[eq + 1] != '"')
        return fail("unquoted attribute in <" + name + ">");
      const auto end = tag.find('"', eq + 2);
      if (end == std::string::npos) return fail("unterminated attribute in <" + name + ">");
      k = end + 1;
    }
    if (stack.empty()) {
      if (root_seen) return fail("more than one root element");
      root_seen = true;
    }
    if (!self) stack.push_back(name);
  }
  if (!stack.empty()) return fail("unclosed element <" + stack.back() + ">");
  if (!root_seen) return fail("no root element");
  return true;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind(".csv");
  if (dot != std::string::npos && dot + 4 == path.size()) return path.substr(0, dot) + suffix + ".csv";
  return path + suffix + ".csv";
}

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

void emit_reports(const ExperimentReport& rep, const ReportPaths& paths) {
  const std::string main = main_csv(rep);
  if (!paths.csv.empty()) {
    write_file(paths.csv, main);
    write_file(sibling_path(paths.csv, "_k"), k_csv(rep));
    write_file(sibling_path(paths.csv, "_summary"), summary_csv(rep));
  }
  if (!paths.svg.empty()) write_file(paths.svg, svg_from_csv(main));
}

}  // namespace gammak
