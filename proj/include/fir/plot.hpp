#pragma once

#include <string>

namespace fir::plot {

// Renders a CSV emitted by this toolkit into a deterministic SVG (fixed
// canvas, no timestamps). The chart type follows the header:
//   t,final,final_norm,approx[,...]          -> line chart
//   frame,q05,q25,median,q75,q95             -> box-distribution chart
//   au_id,mse_pca,mse_full,mse_thresholded   -> grouped bar chart
// Any other header is a SchemaError.
std::string render_csv(const std::string& csv_path);

void render_csv_to_file(const std::string& csv_path, const std::string& svg_path);

}  // namespace fir::plot
