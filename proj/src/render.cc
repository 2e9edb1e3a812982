#include <lpm/render.hh>

#include <algorithm>
#include <functional>
#include <sstream>

using std::string;
using std::vector;

namespace lpm
{
    namespace
    {
        const string dot = "·";

        auto width(const string & s) -> std::size_t
        {
            // code points, which is what a terminal shows for these labels
            return std::size_t(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
        }

        auto pad(const string & s, std::size_t w) -> string
        {
            return s + string(w > width(s) ? w - width(s) : 0, ' ');
        }

        auto rtrim(string s) -> string
        {
            while (! s.empty() && s.back() == ' ')
                s.pop_back();
            return s;
        }

        auto escape(const string & s) -> string
        {
            string r;
            for (char c : s) {
                switch (c) {
                    case '&': r += "&amp;"; break;
                    case '<': r += "&lt;"; break;
                    case '>': r += "&gt;"; break;
                    case '"': r += "&quot;"; break;
                    default: r += c;
                }
            }
            return r;
        }

        struct Grid
        {
            const Instance & inst;
            std::function<bool(Code)> infeasible;
            std::function<string(Code)> label;
            int n, m;

            auto code(int row, int col, int panel, int band) const -> Code
            {
                vector<int> objs{row, col};
                if (n > 2)
                    objs.push_back(panel);
                if (n > 3)
                    objs.push_back(band);
                return inst.encode(objs);
            }

            auto panels() const -> int { return n > 2 ? m : 1; }
            auto bands() const -> int { return n > 3 ? m : 1; }
        };

        auto check_size(const Instance & inst) -> void
        {
            if (inst.agent_count() < 2 || inst.agent_count() > 4)
                throw InputError{"rendering needs 2 to 4 agents, got " + std::to_string(inst.agent_count())};
        }

        auto ascii(const Grid & g) -> string
        {
            auto & inst = g.inst;
            std::size_t cell = 0, rows = 0;
            for (int a = 0; a < g.m; ++a) {
                cell = std::max(cell, width(inst.object_name(a)));
                rows = std::max(rows, width(inst.object_name(a)));
            }
            for (Code x = 0; x < inst.allocation_count(); ++x)
                cell = std::max(cell, width(g.label(x)));
            const std::size_t panel_width = rows + (1 + cell) * std::size_t(g.m);
            const string gap = "    ";

            std::ostringstream out;
            string legend = "rows " + inst.agent_name(0) + ", columns " + inst.agent_name(1);
            if (g.n > 2)
                legend += ", panels " + inst.agent_name(2);
            if (g.n > 3)
                legend += ", panel rows " + inst.agent_name(3);
            out << legend << "\n";

            for (int band = 0; band < g.bands(); ++band) {
                out << "\n";
                if (g.n > 3)
                    out << inst.agent_name(3) << " = " << inst.object_name(band) << "\n";
                if (g.n > 2) {
                    string line;
                    for (int panel = 0; panel < g.panels(); ++panel)
                        line += (panel ? gap : "") + pad(inst.agent_name(2) + " = " + inst.object_name(panel), panel_width);
                    out << rtrim(line) << "\n";
                }
                string header;
                for (int panel = 0; panel < g.panels(); ++panel) {
                    string h = string(rows, ' ');
                    for (int col = 0; col < g.m; ++col)
                        h += " " + pad(inst.object_name(col), cell);
                    header += (panel ? gap : "") + h;
                }
                out << rtrim(header) << "\n";
                for (int row = 0; row < g.m; ++row) {
                    string line;
                    for (int panel = 0; panel < g.panels(); ++panel) {
                        string p = pad(inst.object_name(row), rows);
                        for (int col = 0; col < g.m; ++col)
                            p += " " + pad(g.label(g.code(row, col, panel, band)), cell);
                        line += (panel ? gap : "") + p;
                    }
                    out << rtrim(line) << "\n";
                }
            }
            return out.str();
        }

        auto svg(const Grid & g) -> string
        {
            auto & inst = g.inst;
            const int cw = 56, ch = 28, label = 28, title = 24, gap = 24;
            const int panel_w = label + cw * g.m;
            const int panel_h = title + label + ch * g.m;
            const int total_w = g.panels() * panel_w + (g.panels() - 1) * gap;
            const int total_h = g.bands() * panel_h + (g.bands() - 1) * gap;

            std::ostringstream out;
            out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << total_w << "\" height=\"" << total_h
                << "\" font-family=\"monospace\" font-size=\"12\">\n";
            for (int band = 0; band < g.bands(); ++band)
                for (int panel = 0; panel < g.panels(); ++panel) {
                    const int ox = panel * (panel_w + gap), oy = band * (panel_h + gap);
                    string heading;
                    if (g.n > 2)
                        heading = inst.agent_name(2) + " = " + inst.object_name(panel);
                    if (g.n > 3)
                        heading += ", " + inst.agent_name(3) + " = " + inst.object_name(band);
                    if (! heading.empty())
                        out << "  <text x=\"" << ox << "\" y=\"" << oy + 16 << "\">" << escape(heading) << "</text>\n";
                    const int gx = ox + label, gy = oy + title + label;
                    for (int a = 0; a < g.m; ++a) {
                        out << "  <text x=\"" << gx + a * cw + cw / 2 << "\" y=\"" << gy - 8 << "\" text-anchor=\"middle\">"
                            << escape(inst.object_name(a)) << "</text>\n";
                        out << "  <text x=\"" << ox + label / 2 << "\" y=\"" << gy + a * ch + ch / 2 + 4
                            << "\" text-anchor=\"middle\">" << escape(inst.object_name(a)) << "</text>\n";
                    }
                    for (int row = 0; row < g.m; ++row)
                        for (int col = 0; col < g.m; ++col) {
                            Code x = g.code(row, col, panel, band);
                            const int x0 = gx + col * cw, y0 = gy + row * ch;
                            out << "  <rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << cw << "\" height=\"" << ch
                                << "\" fill=\"" << (g.infeasible(x) ? "#d0d0d0" : "#ffffff") << "\" stroke=\"#000000\"/>\n";
                            string text = g.label(x);
                            if (g.infeasible(x) && text.size() >= 2)
                                text = text.substr(1, text.size() - 2); // shading replaces the brackets
                            out << "  <text x=\"" << x0 + cw / 2 << "\" y=\"" << y0 + ch / 2 + 4 << "\" text-anchor=\"middle\">"
                                << escape(text) << "</text>\n";
                        }
                }
            out << "</svg>\n";
            return out.str();
        }

        auto draw(const Grid & g, RenderFormat format) -> string
        {
            return format == RenderFormat::ascii ? ascii(g) : svg(g);
        }
    }

    auto render(const CompromiserAssignment & alpha, RenderFormat format) -> string
    {
        auto & inst = alpha.instance();
        check_size(inst);
        auto label = [&](Code x) {
            AgentSet s = alpha(x);
            if (s.empty())
                return dot;
            string r = "[";
            for (int i : s.members())
                r += (r.size() > 1 ? " " : "") + inst.agent_name(i);
            return r + "]";
        };
        return draw(Grid{inst, [&](Code x) { return ! alpha(x).empty(); }, label, inst.agent_count(), inst.object_count()}, format);
    }

    auto render(const Constraint & constraint, RenderFormat format) -> string
    {
        auto & inst = constraint.instance();
        check_size(inst);
        auto infeasible = [&](Code x) { return ! constraint.feasible(x); };
        auto label = [&](Code x) { return constraint.feasible(x) ? dot : string{"[ ]"}; };
        return draw(Grid{inst, infeasible, label, inst.agent_count(), inst.object_count()}, format);
    }
}
