#pragma once

#include <lpm/core.hh>

#include <string>

namespace lpm
{
    enum class RenderFormat
    {
        ascii,
        svg
    };

    /// Grid drawing for 2 to 4 agents: agent 1's object picks the row, agent
    /// 2's the column, agent 3's the panel left to right, agent 4's the panel
    /// row top to bottom. Infeasible cells show their compromisers (bracketed
    /// in text, shaded in SVG); feasible cells show a dot. InputError outside
    /// that range of agents.
    auto render(const CompromiserAssignment & alpha, RenderFormat format) -> std::string;

    /// Same layout with empty brackets on the infeasible cells.
    auto render(const Constraint & constraint, RenderFormat format) -> std::string;
}
