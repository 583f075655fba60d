#include "sxp/mapexport.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "sxp/features.hpp"

namespace sxp {

namespace {

using nlohmann::ordered_json;

ordered_json cell_feature_json(const PredictionMapDoc& doc, const CellPrediction& cp) {
    ordered_json f;
    f["type"] = "Feature";
    const auto corners = cell_corners_latlon(cp.cell);
    ordered_json ring = ordered_json::array();
    for (const auto& [lat, lon] : corners) ring.push_back({lon, lat});
    ring.push_back({corners[0].second, corners[0].first});  // close the ring
    f["geometry"]["type"] = "Polygon";
    f["geometry"]["coordinates"] = ordered_json::array({ring});
    f["properties"]["cell"] = cp.cell.str();
    f["properties"]["rank"] = cp.rank;
    f["properties"]["influence"] = cp.influence;
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < cp.probabilities.size(); ++i) {
        f["properties"][std::string("p_") + to_string(doc.class_list[i])] =
            cp.probabilities[i];
        if (cp.probabilities[i] > best) {
            best = cp.probabilities[i];
            best_i = i;
        }
    }
    f["properties"]["top_class"] = to_string(doc.class_list[best_i]);
    return f;
}

}  // namespace

PredictionMapDoc export_map(const GbdtModel& model,
                            const std::vector<double>& feature_mean_abs, int weekday,
                            int hour, int top_n) {
    if (weekday < 0 || weekday > 6) throw std::invalid_argument("weekday must be 0..6");
    if (hour < 0 || hour > 23) throw std::invalid_argument("hour must be 0..23");
    if (feature_mean_abs.size() != model.feature_names.size())
        throw std::invalid_argument("attribution vector does not match model features");

    PredictionMapDoc doc;
    doc.weekday = weekday;
    doc.hour = hour;
    doc.class_list = model.class_list;

    struct Ranked {
        std::size_t feature;
        double influence;
    };
    std::vector<Ranked> location_features;
    for (std::size_t i = 0; i < model.feature_names.size(); ++i)
        if (model.feature_names[i].rfind("mgrs_", 0) == 0)
            location_features.push_back({i, feature_mean_abs[i]});
    if (location_features.empty()) {
        doc.warning = "model has no location features";
        return doc;
    }
    std::stable_sort(location_features.begin(), location_features.end(),
                     [](const Ranked& a, const Ranked& b) { return a.influence > b.influence; });
    if (static_cast<int>(location_features.size()) > top_n)
        location_features.resize(static_cast<std::size_t>(top_n));

    const MomentContext moment{weekday, hour};
    for (std::size_t r = 0; r < location_features.size(); ++r) {
        const auto& lf = location_features[r];
        const auto cell = GridCell::parse(model.feature_names[lf.feature].substr(5));
        if (!cell) continue;
        CellPrediction cp;
        cp.cell = *cell;
        cp.rank = static_cast<int>(r + 1);
        cp.influence = lf.influence;
        const auto x = featurize(model.feature_names, moment, cell);
        cp.probabilities = model.predict_proba(x);
        doc.cells.push_back(std::move(cp));
    }
    return doc;
}

std::string map_to_geojson(const PredictionMapDoc& doc) {
    ordered_json j;
    j["type"] = "FeatureCollection";
    ordered_json props;
    props["weekday"] = doc.weekday;
    props["hour"] = doc.hour;
    if (!doc.warning.empty()) props["warning"] = doc.warning;
    j["properties"] = props;
    ordered_json features = ordered_json::array();
    for (const auto& cp : doc.cells) features.push_back(cell_feature_json(doc, cp));
    j["features"] = features;
    return j.dump(2);
}

std::string map_to_html(const PredictionMapDoc& doc) {
    const std::string geojson = map_to_geojson(doc);
    std::string html;
    html += "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n";
    html += "<title>Valence prediction map</title>\n<style>\n";
    html += "body{font-family:sans-serif;margin:1em}\n";
    html += "#map{border:1px solid #999;background:#f4f8fb}\n";
    html += ".cell{stroke:#333;stroke-width:1;cursor:pointer;fill-opacity:.65}\n";
    html += ".cell:hover{fill-opacity:.9;stroke-width:2}\n";
    html += "#tip{position:absolute;display:none;background:#fff;border:1px solid #333;";
    html += "padding:6px 8px;font-size:12px;pointer-events:none;white-space:pre}\n";
    html += "</style>\n</head>\n<body>\n";
    html += "<h3 id=\"title\"></h3>\n<svg id=\"map\" width=\"900\" height=\"600\"></svg>\n";
    html += "<div id=\"tip\"></div>\n<script>\nconst doc = ";
    html += geojson;
    html += ";\n";
    html += R"JS(
const dayNames = ["Monday","Tuesday","Wednesday","Thursday","Friday","Saturday","Sunday"];
document.getElementById("title").textContent =
  "Predicted valence, " + dayNames[doc.properties.weekday] + " " +
  String(doc.properties.hour).padStart(2, "0") + ":00" +
  (doc.properties.warning ? " — " + doc.properties.warning : "");
const svg = document.getElementById("map"), tip = document.getElementById("tip");
const W = 900, H = 600, pad = 40;
let minX = 1e9, maxX = -1e9, minY = 1e9, maxY = -1e9;
for (const f of doc.features)
  for (const [x, y] of f.geometry.coordinates[0]) {
    minX = Math.min(minX, x); maxX = Math.max(maxX, x);
    minY = Math.min(minY, y); maxY = Math.max(maxY, y);
  }
if (doc.features.length === 0) { minX = 0; maxX = 1; minY = 0; maxY = 1; }
const spanX = Math.max(maxX - minX, 1e-6), spanY = Math.max(maxY - minY, 1e-6);
const scale = Math.min((W - 2 * pad) / spanX, (H - 2 * pad) / spanY);
const px = x => pad + (x - minX) * scale;
const py = y => H - pad - (y - minY) * scale;
const colors = {negative: "#d9534f", neutral: "#f0ad4e", positive: "#5cb85c"};
for (const f of doc.features) {
  const p = f.properties;
  const poly = document.createElementNS("http://www.w3.org/2000/svg", "polygon");
  poly.setAttribute("points",
    f.geometry.coordinates[0].map(([x, y]) => px(x) + "," + py(y)).join(" "));
  poly.setAttribute("class", "cell");
  poly.setAttribute("fill", colors[p.top_class] || "#888");
  poly.addEventListener("mousemove", ev => {
    let text = p.cell + "  (rank " + p.rank + ")\n";
    for (const k of Object.keys(p))
      if (k.startsWith("p_"))
        text += k.slice(2) + ": " + (100 * p[k]).toFixed(1) + "%\n";
    tip.textContent = text;
    tip.style.left = (ev.pageX + 12) + "px";
    tip.style.top = (ev.pageY + 12) + "px";
    tip.style.display = "block";
  });
  poly.addEventListener("mouseleave", () => tip.style.display = "none");
  svg.appendChild(poly);
}
)JS";
    html += "</script>\n</body>\n</html>\n";
    return html;
}

}  // namespace sxp
