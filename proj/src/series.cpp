#include "pdelab/series.hpp"

#include <stdexcept>

namespace pdelab {

void write_series_csv(const std::string& path, const std::vector<const NormSeries*>& series) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("write_series_csv: cannot open " + path);
    std::fprintf(fp, "t,quantity,value\n");
    for (const NormSeries* s : series)
        for (const auto& [t, v] : s->samples())
            std::fprintf(fp, "%.17g,%s,%.17g\n", t, s->tag().c_str(), v);
    std::fclose(fp);
}

} // namespace pdelab
