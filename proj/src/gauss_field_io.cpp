#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sol3/errors.hpp"
#include "sol3/gauss_map.hpp"

namespace sol3::gauss {

using nlohmann::json;

void write_field_csv(const GaussField& f, const std::string& path) {
  if (!f.grid && f.points.size() != f.samples.size())
    throw NumericalError(ErrorKind::InvalidArgument, "scattered field without parameter points");
  json header;
  header["H"] = f.H;
  if (f.grid) {
    const GridSpec& g = *f.grid;
    header["grid"] = {{"nu", g.nu}, {"nv", g.nv}, {"u0", g.u0}, {"v0", g.v0}, {"du", g.du}, {"dv", g.dv}};
  } else {
    header["grid"] = nullptr;
  }
  json dual = json::array();
  for (std::size_t k = 0; k < f.samples.size(); ++k)
    if (f.samples[k].chart == Chart::Dual) dual.push_back(k);
  header["dual_rows"] = dual;

  std::ofstream os(path);
  if (!os) throw NumericalError(ErrorKind::Io, "cannot write " + path);
  os << "# " << header.dump() << "\n";
  os << "u,v,re_g,im_g,re_gz,im_gz,re_gzbar,im_gzbar\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < f.samples.size(); ++k) {
    double u, v;
    if (f.grid) {
      const int i = static_cast<int>(k) / f.grid->nv;
      const int j = static_cast<int>(k) % f.grid->nv;
      u = f.grid->u(i);
      v = f.grid->v(j);
    } else {
      u = f.points[k][0];
      v = f.points[k][1];
    }
    const GaussSample& s = f.samples[k];
    os << u << ',' << v << ',' << s.value.real() << ',' << s.value.imag() << ',' << s.dz.real()
       << ',' << s.dz.imag() << ',' << s.dzbar.real() << ',' << s.dzbar.imag() << "\n";
  }
}

GaussField read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw NumericalError(ErrorKind::Io, "cannot read " + path);
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw NumericalError(ErrorKind::Io, "missing JSON header in " + path);
  json header;
  try {
    header = json::parse(line.substr(2));
  } catch (const json::exception& e) {
    throw NumericalError(ErrorKind::Io, std::string("bad header: ") + e.what());
  }
  GaussField f;
  f.H = header.at("H").get<double>();
  if (!header.at("grid").is_null()) {
    const json& g = header["grid"];
    f.grid = GridSpec{g.at("nu").get<int>(), g.at("nv").get<int>(), g.at("u0").get<double>(),
                      g.at("v0").get<double>(), g.at("du").get<double>(), g.at("dv").get<double>()};
  }
  std::set<std::size_t> dual;
  for (const auto& k : header.value("dual_rows", json::array())) dual.insert(k.get<std::size_t>());

  std::getline(is, line);  // column names
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double c[8];
    char comma;
    for (int k = 0; k < 8; ++k) {
      if (k > 0) ls >> comma;
      ls >> c[k];
    }
    if (!ls) throw NumericalError(ErrorKind::Io, "malformed row: " + line);
    const Chart chart = dual.count(f.samples.size()) ? Chart::Dual : Chart::Direct;
    f.samples.push_back({chart, {c[2], c[3]}, {c[4], c[5]}, {c[6], c[7]}});
    f.points.push_back({c[0], c[1]});
  }
  if (f.grid) {
    if (static_cast<int>(f.samples.size()) != f.grid->size())
      throw NumericalError(ErrorKind::Io, "row count does not match grid");
    f.points.clear();
  }
  return f;
}

}  // namespace sol3::gauss
