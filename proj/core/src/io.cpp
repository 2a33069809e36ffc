#include "evoset/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace evoset::io {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

double parse_double(const std::string& s, const char* context) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError(std::string(context) + ": malformed number '" + s + "'");
    }
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string field_to_csv(const ScalarField& field) {
    field.validate();
    const auto& g = field.grid;
    std::ostringstream out;
    out << "# a_min=" << format_double(g.a_min) << "\n# a_max=" << format_double(g.a_max)
        << "\n# b_min=" << format_double(g.b_min) << "\n# b_max=" << format_double(g.b_max)
        << "\n# n_a=" << g.n_a << "\n# n_b=" << g.n_b << "\n# s=" << format_double(field.s)
        << "\na,b,value\n";
    for (int i = 0; i < g.n_a; ++i)
        for (int j = 0; j < g.n_b; ++j)
            out << format_double(g.a_at(i)) << ',' << format_double(g.b_at(j)) << ','
                << format_double(field.at(i, j)) << '\n';
    return out.str();
}

ScalarField field_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::map<std::string, std::string> meta;
    std::vector<double> values;
    bool header_seen = false;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                key.erase(0, key.find_first_not_of(' '));
                key.erase(key.find_last_not_of(' ') + 1);
                meta[key] = line.substr(eq + 1);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "a,b,value")
                throw InputError("field CSV: expected header 'a,b,value', got '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 3) throw InputError("field CSV: malformed row '" + line + "'");
        values.push_back(parse_double(cols[2], "field CSV"));
    }

    for (const char* key : {"a_min", "a_max", "b_min", "b_max", "n_a", "n_b", "s"})
        if (!meta.count(key))
            throw InputError(std::string("field CSV: missing metadata key ") + key);

    ScalarField field;
    field.grid.a_min = parse_double(meta["a_min"], "field CSV");
    field.grid.a_max = parse_double(meta["a_max"], "field CSV");
    field.grid.b_min = parse_double(meta["b_min"], "field CSV");
    field.grid.b_max = parse_double(meta["b_max"], "field CSV");
    field.grid.n_a = static_cast<int>(parse_double(meta["n_a"], "field CSV"));
    field.grid.n_b = static_cast<int>(parse_double(meta["n_b"], "field CSV"));
    field.s = parse_double(meta["s"], "field CSV");
    field.values = std::move(values);
    field.validate();
    return field;
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& field) {
    write_file_atomic(path, field_to_csv(field));
}

ScalarField read_field_csv(const std::filesystem::path& path) {
    return field_from_csv(read_file(path));
}

std::string contours_to_json(double s, double c, const std::vector<Contour>& contours) {
    std::ostringstream out;
    out << "{\"s\":" << format_double(s) << ",\"c\":" << format_double(c) << ",\"contours\":[";
    for (size_t k = 0; k < contours.size(); ++k) {
        const auto& contour = contours[k];
        if (k) out << ',';
        out << "{\"closed\":" << (contour.closed ? "true" : "false") << ",\"points\":[";
        for (size_t n = 0; n < contour.points.size(); ++n) {
            if (n) out << ',';
            out << '[' << format_double(contour.points[n][0]) << ','
                << format_double(contour.points[n][1]) << ']';
        }
        out << "]}";
    }
    out << "]}\n";
    return out.str();
}

std::vector<Contour> contours_from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        std::vector<Contour> out;
        for (const auto& entry : doc.at("contours")) {
            Contour contour;
            contour.s = doc.at("s").get<double>();
            contour.c = doc.at("c").get<double>();
            contour.closed = entry.at("closed").get<bool>();
            for (const auto& pt : entry.at("points"))
                contour.points.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
            out.push_back(std::move(contour));
        }
        return out;
    } catch (const json::exception& e) {
        throw InputError(std::string("contour JSON: ") + e.what());
    }
}

void write_contours_json(const std::filesystem::path& path, double s, double c,
                         const std::vector<Contour>& contours) {
    write_file_atomic(path, contours_to_json(s, c, contours));
}

std::vector<Contour> read_contours_json(const std::filesystem::path& path) {
    return contours_from_json(read_file(path));
}

std::string surface_to_json(const BSplineSurface& surface) {
    std::ostringstream out;
    out << "{\"degree_u\":" << surface.knots_u.degree << ",\"degree_v\":" << surface.knots_v.degree
        << ",\"knots_u\":[";
    for (size_t k = 0; k < surface.knots_u.knots.size(); ++k) {
        if (k) out << ',';
        out << format_double(surface.knots_u.knots[k]);
    }
    out << "],\"knots_v\":[";
    for (size_t k = 0; k < surface.knots_v.knots.size(); ++k) {
        if (k) out << ',';
        out << format_double(surface.knots_v.knots[k]);
    }
    out << "],\"control_net\":[";
    for (size_t k = 0; k < surface.control_net.size(); ++k) {
        if (k) out << ',';
        out << '[' << format_double(surface.control_net[k][0]) << ','
            << format_double(surface.control_net[k][1]) << ','
            << format_double(surface.control_net[k][2]) << ']';
    }
    out << "]}\n";
    return out.str();
}

BSplineSurface surface_from_json(const std::string& text) {
    BSplineSurface surface;
    try {
        const json doc = json::parse(text);
        surface.knots_u.degree = doc.at("degree_u").get<int>();
        surface.knots_v.degree = doc.at("degree_v").get<int>();
        surface.knots_u.knots = doc.at("knots_u").get<std::vector<double>>();
        surface.knots_v.knots = doc.at("knots_v").get<std::vector<double>>();
        for (const auto& triple : doc.at("control_net"))
            surface.control_net.push_back({triple.at(0).get<double>(), triple.at(1).get<double>(),
                                           triple.at(2).get<double>()});
    } catch (const json::exception& e) {
        throw InputError(std::string("surface JSON: ") + e.what());
    }
    const size_t expect = static_cast<size_t>(surface.rows()) * surface.cols();
    if (surface.rows() <= 0 || surface.cols() <= 0 || surface.control_net.size() != expect)
        throw InputError("surface JSON: control net size inconsistent with knot vectors");
    return surface;
}

void write_surface_json(const std::filesystem::path& path, const BSplineSurface& surface) {
    write_file_atomic(path, surface_to_json(surface));
}

BSplineSurface read_surface_json(const std::filesystem::path& path) {
    return surface_from_json(read_file(path));
}

DriftTrajectory trajectory_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    DriftTrajectory trajectory;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "s,omega,epsilon")
                throw InputError("trajectory CSV: expected header 's,omega,epsilon'");
            header_seen = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 3)
            throw InputError("trajectory CSV: malformed row '" + line + "'");
        trajectory.samples.push_back({parse_double(cols[0], "trajectory CSV"),
                                      parse_double(cols[1], "trajectory CSV"),
                                      parse_double(cols[2], "trajectory CSV")});
    }
    trajectory.validate();
    return trajectory;
}

DriftTrajectory read_trajectory_csv(const std::filesystem::path& path) {
    return trajectory_from_csv(read_file(path));
}

std::string schedule_to_json(double d_target, const CorrectionSchedule& schedule) {
    std::ostringstream out;
    out << "{\"d_target\":" << format_double(d_target) << ",\"failures\":" << schedule.failures
        << ",\"entries\":[";
    for (size_t k = 0; k < schedule.entries.size(); ++k) {
        const auto& e = schedule.entries[k];
        if (k) out << ',';
        out << "{\"s\":" << format_double(e.s) << ",\"b\":" << format_double(e.b)
            << ",\"achieved_d\":" << format_double(e.achieved_d)
            << ",\"residual\":" << format_double(e.residual) << ",\"status\":\""
            << (e.status == ScheduleStatus::solved ? "solved" : "unreachable") << "\"}";
    }
    out << "]}\n";
    return out.str();
}

void write_schedule_json(const std::filesystem::path& path, double d_target,
                         const CorrectionSchedule& schedule) {
    write_file_atomic(path, schedule_to_json(d_target, schedule));
}

namespace {

constexpr int kSvgSize = 640;
constexpr int kSvgMargin = 40;

const char* stroke_color(size_t index) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return palette[index % (sizeof palette / sizeof palette[0])];
}

}  // namespace

std::string contours_to_svg(const ParameterGrid& box, const std::vector<Contour>& contours) {
    box.validate();
    const double span = kSvgSize - 2.0 * kSvgMargin;
    const auto sx = [&](double a) {
        return kSvgMargin + span * (a - box.a_min) / (box.a_max - box.a_min);
    };
    const auto sy = [&](double b) {
        return kSvgSize - kSvgMargin - span * (b - box.b_min) / (box.b_max - box.b_min);
    };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kSvgSize << ' '
        << kSvgSize << "\">\n"
        << "<rect x=\"" << kSvgMargin << "\" y=\"" << kSvgMargin << "\" width=\"" << span
        << "\" height=\"" << span << "\" fill=\"white\" stroke=\"black\"/>\n";
    for (size_t k = 0; k < contours.size(); ++k) {
        const auto& contour = contours[k];
        if (contour.points.empty()) continue;
        out << "<poly" << (contour.closed ? "gon" : "line") << " points=\"";
        for (size_t n = 0; n < contour.points.size(); ++n) {
            if (n) out << ' ';
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3f,%.3f", sx(contour.points[n][0]),
                          sy(contour.points[n][1]));
            out << buf;
        }
        out << "\" fill=\"none\" stroke=\"" << stroke_color(k) << "\" stroke-width=\"1.5\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_contours_svg(const std::filesystem::path& path, const ParameterGrid& box,
                        const std::vector<Contour>& contours) {
    write_file_atomic(path, contours_to_svg(box, contours));
}

}  // namespace evoset::io
