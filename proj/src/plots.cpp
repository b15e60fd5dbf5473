#include <cstdio>
#include <sstream>

#include "sentiment/pipeline.hpp"

namespace sentiment {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string open_svg(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
         std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
}

std::string text(double x, double y, const std::string& s, const char* anchor = "middle") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\">" + escape(s) +
         "</text>\n";
}

std::string line(double x1, double y1, double x2, double y2, const char* extra = "") {
  return "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
         "\" stroke=\"black\"" + extra + "/>\n";
}

std::string rect(double x, double y, double w, double h, const std::string& fill) {
  return "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" fill=\"" + fill + "\"/>\n";
}

}  // namespace

std::string roc_svg(const RocCurve& curve, const std::string& title) {
  constexpr double left = 50, top = 40, size = 300;
  auto px = [&](double fpr) { return left + fpr * size; };
  auto py = [&](double tpr) { return top + (1.0 - tpr) * size; };
  std::ostringstream os;
  os << open_svg(400, 400);
  char auc[32];
  std::snprintf(auc, sizeof auc, "%.4f", curve.auc);
  os << text(200, 24, title + " (AUC = " + auc + ")");
  os << line(left, top + size, left + size, top + size) << line(left, top, left, top + size);
  os << line(px(0), py(0), px(1), py(1), " stroke-dasharray=\"4 4\" stroke-opacity=\"0.5\"");
  for (int i = 0; i <= 4; ++i) {
    const double v = i / 4.0;
    os << text(px(v), top + size + 16, num(v)) << text(left - 6, py(v) + 4, num(v), "end");
  }
  os << text(200, 390, "False positive rate");
  os << "<text x=\"14\" y=\"" << num(top + size / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
     << num(top + size / 2) << ")\">True positive rate</text>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    os << (i ? " " : "") << num(px(curve.points[i].fpr)) << ',' << num(py(curve.points[i].tpr));
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

std::string confusion_svg(const ConfusionMatrix& cm, const std::string& title) {
  constexpr double left = 110, top = 60, cell = 120;
  const double total = static_cast<double>(std::max<std::uint64_t>(cm.total(), 1));
  // Rows: actual Positive, Negative. Columns: predicted Positive, Negative.
  const std::uint64_t counts[2][2] = {{cm.tp, cm.fn}, {cm.fp, cm.tn}};
  const char* names[2] = {"Positive", "Negative"};
  std::ostringstream os;
  os << open_svg(380, 340);
  os << text(190, 24, title);
  os << text(left + cell, top - 22, "Predicted");
  for (int r = 0; r < 2; ++r) {
    os << text(left + cell * r + cell / 2, top - 6, names[r]);
    os << text(left - 8, top + cell * r + cell / 2 + 4, names[r], "end");
    for (int c = 0; c < 2; ++c) {
      const double share = static_cast<double>(counts[r][c]) / total;
      char fill[16];
      const int shade = 255 - static_cast<int>(share * 200.0);
      std::snprintf(fill, sizeof fill, "#%02x%02xff", shade, shade);
      os << rect(left + cell * c, top + cell * r, cell, cell, fill);
      os << text(left + cell * c + cell / 2, top + cell * r + cell / 2 + 4, std::to_string(counts[r][c]));
    }
  }
  os << "<text x=\"20\" y=\"" << num(top + cell) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << num(top + cell) << ")\">Actual</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string sensitivity_svg(const std::vector<SensitivityRow>& rows) {
  constexpr double left = 50, top = 40, height = 240, group = 60, bar = 22;
  const double width = group * static_cast<double>(rows.size());
  auto py = [&](double p) { return top + (1.0 - p) * height; };
  std::ostringstream os;
  os << open_svg(static_cast<int>(left + width + 120), static_cast<int>(top + height + 50));
  os << text(left + width / 2, 24, "Probability of Positive by sentence");
  os << line(left, top, left, top + height) << line(left, top + height, left + width, top + height);
  for (int i = 0; i <= 4; ++i) os << text(left - 6, py(i / 4.0) + 4, num(i / 4.0), "end");
  os << line(left, py(0.5), left + width, py(0.5), " stroke-dasharray=\"4 4\" stroke-opacity=\"0.5\"");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double x = left + group * static_cast<double>(i) + (group - 2 * bar) / 2;
    os << rect(x, py(rows[i].lr_p_positive), bar, rows[i].lr_p_positive * height, "#ff7f0e");
    os << rect(x + bar, py(rows[i].rnn_p_positive), bar, rows[i].rnn_p_positive * height, "#1f77b4");
    os << text(x + bar, top + height + 16, "S" + std::to_string(rows[i].id));
  }
  const double lx = left + width + 16;
  os << rect(lx, top, 12, 12, "#ff7f0e") << text(lx + 18, top + 10, "LR", "start");
  os << rect(lx, top + 20, 12, 12, "#1f77b4") << text(lx + 18, top + 30, "RNN", "start");
  os << "</svg>\n";
  return os.str();
}

}  // namespace sentiment
