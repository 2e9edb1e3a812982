#pragma once

#include <lpm/compare.hh>
#include <lpm/enumerate.hh>
#include <lpm/mechanisms.hh>

#include <json.hpp>

#include <string>

namespace lpm::io
{
    using Json = nlohmann::ordered_json;

    /// Reads and parses a JSON file; InputError names the file on failure.
    auto read_json(const std::string & path) -> Json;
    auto parse_json(const std::string & text, const std::string & where) -> Json;

    /// {"agents": [...], "objects": [...], "kind": "...", ...}. Explicit
    /// constraints list their feasible allocations as arrays of object names.
    auto constraint_from_json(const Json & j) -> Constraint;
    auto to_json(const Constraint & c) -> Json;

    /// {"agents": [...], "objects": [...], "cells": {"a,a,b": ["1", "2"], ...}}.
    /// With a constraint the cells must cover exactly its infeasible
    /// allocations; without one the cells imply it.
    auto alpha_from_json(const Json & j, const std::optional<Constraint> & constraint = std::nullopt) -> CompromiserAssignment;
    auto to_json(const CompromiserAssignment & alpha) -> Json;

    /// {"1": ["a", "b", "c"], ...}, one complete ranking per agent.
    auto profile_from_json(const Instance & inst, const Json & j) -> Profile;
    auto to_json(const Instance & inst, const Profile & p) -> Json;

    auto allocation_to_json(const Instance & inst, Code x) -> Json;
    auto allocation_key(const Instance & inst, Code x) -> std::string; // "a,a,b"
    auto allocation_from_key(const Instance & inst, const std::string & key) -> Code;

    // Mechanism spec files, by name.
    auto school_from_json(const Instance & inst, const Json & j) -> SchoolSpec;
    auto endowment_from_json(const Instance & inst, const Json & j) -> Endowment;
    auto order_from_json(const Instance & inst, const Json & j) -> DictatorOrder;
    auto marriage_from_json(const Instance & inst, const Json & j) -> MarriageSpec;

    auto to_json(const Instance & inst, const Witness & w) -> Json;
    auto to_json(const Instance & inst, const Verdict & v) -> Json;
    auto to_json(const Instance & inst, const Outcome & o, bool trace) -> Json;
    auto to_json(const Instance & inst, const DominanceReport & r) -> Json;
    auto to_json(const EnumerationSummary & s) -> Json;
}
