#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "agres/approx.hpp"
#include "agres/converge.hpp"
#include "agres/renorm.hpp"
#include "json.hpp"

namespace agres {

using Json = nlohmann::ordered_json;

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& text);

/// {"x": .., "y": .., "exact": "[..]"}
Json point_json(const Point& p);

Json form_json(const FiniteForm& form);

/// lambda is written exactly as "p/q"; the boundary form carries the exact
/// boundary points.
Json solution_json(const Instance& inst, const Solution& sol);
Json measure_json(const MeasureSpec& mu);

/// index,label,x,y,exact
std::string boundary_csv(const BoundarySet& b);
/// id,x,y,exact[,mass]
std::string vertices_csv(const GraphApprox& g, const Eigen::VectorXd* masses = nullptr);
/// vertex_id_1,vertex_id_2
std::string edges_csv(const GraphApprox& g);
/// x,y,c
std::string form_csv(const FiniteForm& form);
std::string resistance_csv(const LevelForm& lf, const std::vector<PairResistance>& rows);
/// x_id,y_id,u in row-major order.
std::string kernel_csv(const ResolventKernel& k);

std::string report_csv(const ConvergenceReport& rep);
Json report_json(const ConvergenceReport& rep);

/// Writes text to path, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace agres
