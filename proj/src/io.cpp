#include "agres/io.hpp"

#include <fstream>
#include <sstream>

#include "agres/errors.hpp"

namespace agres {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json point_json(const Point& p) {
  const auto d = p.to_double();
  return Json{{"x", d[0]}, {"y", d[1]}, {"exact", p.exact_string()}};
}

Json form_json(const FiniteForm& form) {
  Json edges = Json::array();
  for (const auto& e : form.edges()) edges.push_back(Json{{"x", e.x}, {"y", e.y}, {"c", e.c}});
  return Json{{"vertices", form.size()}, {"edges", std::move(edges)}};
}

Json solution_json(const Instance& inst, const Solution& sol) {
  Json points = Json::array();
  for (std::size_t k = 0; k < inst.boundary.size(); ++k) {
    Json p = point_json(inst.boundary.points[k]);
    p["index"] = k;
    p["label"] = inst.boundary.labels[k].str();
    points.push_back(std::move(p));
  }
  Json form = form_json(sol.D);
  form["points"] = std::move(points);
  return Json{{"lambda", rational_string(sol.lambda)},
              {"s", sol.s},
              {"r", sol.r},
              {"C", sol.C},
              {"rtilde4", sol.rtilde4},
              {"theta", sol.theta},
              {"residual", sol.residual},
              {"eigen_iterations", sol.eigen_iterations},
              {"bisection_steps", sol.bisection_steps},
              {"experimental", sol.experimental},
              {"boundary_form", std::move(form)}};
}

Json measure_json(const MeasureSpec& mu) {
  Json out{{"scheme", to_string(mu.scheme)}, {"weights", mu.weights}};
  if (mu.scheme == MeasureScheme::Hausdorff) out["dimension"] = mu.dimension;
  return out;
}

std::string boundary_csv(const BoundarySet& b) {
  std::ostringstream out;
  out << "index,label,x,y,exact\n";
  for (std::size_t k = 0; k < b.size(); ++k) {
    const auto d = b.points[k].to_double();
    out << k << ',' << csv_field(b.labels[k].str()) << ',' << decimal_string(d[0]) << ',' << decimal_string(d[1])
        << ',' << csv_field(b.points[k].exact_string()) << '\n';
  }
  return out.str();
}

std::string vertices_csv(const GraphApprox& g, const Eigen::VectorXd* masses) {
  std::ostringstream out;
  out << "id,x,y,exact" << (masses ? ",mass" : "") << '\n';
  for (std::size_t k = 0; k < g.vertices.size(); ++k) {
    const auto d = g.vertices[k].to_double();
    out << k << ',' << decimal_string(d[0]) << ',' << decimal_string(d[1]) << ','
        << csv_field(g.vertices[k].exact_string());
    if (masses) out << ',' << decimal_string((*masses)[static_cast<Eigen::Index>(k)]);
    out << '\n';
  }
  return out.str();
}

std::string edges_csv(const GraphApprox& g) {
  std::ostringstream out;
  out << "vertex_id_1,vertex_id_2\n";
  for (const auto& [a, b] : g.edges) out << a << ',' << b << '\n';
  return out.str();
}

std::string form_csv(const FiniteForm& form) {
  std::ostringstream out;
  out << "x,y,c\n";
  for (const auto& e : form.edges()) out << e.x << ',' << e.y << ',' << decimal_string(e.c) << '\n';
  return out.str();
}

std::string resistance_csv(const LevelForm& lf, const std::vector<PairResistance>& rows) {
  std::ostringstream out;
  out << "id1,x1,y1,exact1,id2,x2,y2,exact2,R\n";
  for (const auto& row : rows) {
    for (int id : {row.x, row.y}) {
      const Point& p = lf.graph.vertices[id];
      const auto d = p.to_double();
      out << id << ',' << decimal_string(d[0]) << ',' << decimal_string(d[1]) << ',' << csv_field(p.exact_string())
          << ',';
    }
    out << decimal_string(row.value) << '\n';
  }
  return out.str();
}

std::string kernel_csv(const ResolventKernel& k) {
  std::ostringstream out;
  out << "x_id,y_id,u\n";
  for (Eigen::Index x = 0; x < k.matrix.rows(); ++x)
    for (Eigen::Index y = 0; y < k.matrix.cols(); ++y) out << x << ',' << y << ',' << decimal_string(k.matrix(x, y)) << '\n';
  return out.str();
}

std::string report_csv(const ConvergenceReport& rep) {
  std::ostringstream out;
  const auto& pairs = rep.options.pairs;
  const bool kernel = rep.options.alpha.has_value();
  out << "n,lambda_num,lambda_den,r";
  for (const auto& p : pairs) out << ',' << csv_field("R" + p.str());
  if (kernel)
    for (const auto& p : pairs) out << ',' << csv_field("u" + p.str());
  for (const auto& v : rep.verdicts) out << ',' << csv_field("diff_" + v.quantity);
  out << '\n';
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const auto& row = rep.rows[k];
    out << row.n << ',' << row.lambda.get_num().get_str() << ',' << row.lambda.get_den().get_str() << ','
        << decimal_string(row.r);
    for (double v : row.resistance) out << ',' << decimal_string(v);
    for (double v : row.kernel) out << ',' << decimal_string(v);
    for (const auto& v : rep.verdicts) out << ',' << (k == 0 ? std::string() : decimal_string(v.diffs[k - 1]));
    out << '\n';
  }
  return out.str();
}

Json report_json(const ConvergenceReport& rep) {
  Json rows = Json::array();
  for (const auto& row : rep.rows) {
    Json j{{"n", row.n}, {"lambda", rational_string(row.lambda)}, {"r", row.r}, {"residual", row.residual},
           {"resistance", row.resistance}};
    if (rep.options.alpha) j["kernel"] = row.kernel;
    rows.push_back(std::move(j));
  }
  Json verdicts = Json::array();
  for (const auto& v : rep.verdicts)
    verdicts.push_back(Json{{"quantity", v.quantity},
                            {"diffs", v.diffs},
                            {"trend", v.trend},
                            {"final_gap", v.final_gap},
                            {"pass", v.pass()}});
  Json pairs = Json::array();
  for (const auto& p : rep.options.pairs) pairs.push_back(p.str());
  return Json{{"target", rep.schedule.target.text},
              {"target_value", rep.schedule.target.value},
              {"s", rep.options.s},
              {"level", rep.options.level},
              {"pairs", std::move(pairs)},
              {"alpha", rep.options.alpha ? Json(*rep.options.alpha) : Json(nullptr)},
              {"rows", std::move(rows)},
              {"verdicts", std::move(verdicts)},
              {"pass", rep.all_pass()}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::DomainError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorKind::DomainError, "failed writing " + path.string());
}

}  // namespace agres
