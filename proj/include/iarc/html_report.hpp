#pragma once

#include <string>

#include "iarc/card.hpp"

namespace iarc {

struct HtmlOptions {
  /// Adds a small inline script with expand-all / collapse-all buttons.
  bool collapsible = false;
};

/// Single self-contained HTML page: one <details> block per card section,
/// inline SVG plots, every plotted series mirrored as a table, and the
/// canonical card JSON embedded in <script type="application/json"
/// id="iarc-card-data">.
std::string render_html(const IarcDocument& doc, const HtmlOptions& options = {});

/// Four significant digits, as used throughout the report.
std::string format_sig4(double v);

std::string html_escape(std::string_view text);

}  // namespace iarc
