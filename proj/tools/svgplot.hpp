#pragma once

#include <string>
#include <vector>

namespace femcert::tools {

// Minimal self-contained SVG line plots; no external plotting dependency.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel, bool logx = false,
            bool logy = false);

    void add_series(std::string name, std::vector<double> x, std::vector<double> y);
    std::string render() const;

private:
    std::string title_, xlabel_, ylabel_;
    bool logx_, logy_;
    struct Series {
        std::string name;
        std::vector<double> x, y;
    };
    std::vector<Series> series_;
};

} // namespace femcert::tools
