//
// Project     : schedopt
// File        : mps.cpp
// Description : MPS export, solution import, external-solver bridge
//

#include "schedopt/solve.hpp"
#include "schedopt/text.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace schedopt {

namespace {

constexpr double kBinarySnapTol = 1e-6;

void append_field(std::string& out, const std::string& field, std::size_t width) {
    out += field;
    if (field.size() < width)
        out.append(width - field.size(), ' ');
    else
        out += ' ';
}

void append_entry(std::string& out, const std::string& column, const std::string& row,
                  double value) {
    out += "    ";
    append_field(out, column, 12);
    append_field(out, row, 12);
    out += format_double(value);
    out += '\n';
}

} // namespace

std::string export_mps(const MilpModel& model) {
    std::string out;
    out += "NAME          SCHEDOPT\n";
    out += "ROWS\n";
    out += " N  COST\n";
    for (const Constraint& row : model.cons) {
        switch (row.sense) {
        case Sense::LE:
            out += " L  ";
            break;
        case Sense::EQ:
            out += " E  ";
            break;
        case Sense::GE:
            out += " G  ";
            break;
        }
        out += row.name;
        out += '\n';
    }

    // per-variable entries, in row order
    std::vector<std::vector<std::pair<int, double>>> columns(model.vars.size());
    for (const LinTerm& term : model.objective)
        columns[static_cast<std::size_t>(term.var)].push_back({-1, term.coef});
    for (std::size_t r = 0; r < model.cons.size(); ++r)
        for (const LinTerm& term : model.cons[r].terms)
            columns[static_cast<std::size_t>(term.var)].push_back(
                {static_cast<int>(r), term.coef});

    out += "COLUMNS\n";
    bool in_integer_block = false;
    int marker = 0;
    for (std::size_t j = 0; j < model.vars.size(); ++j) {
        const VarRef& var = model.vars[j];
        if (var.binary != in_integer_block) {
            out += "    MARKER" + std::to_string(marker++) + "    'MARKER'    " +
                   (var.binary ? "'INTORG'" : "'INTEND'") + "\n";
            in_integer_block = var.binary;
        }
        for (const auto& [row, coef] : columns[j])
            append_entry(out, var.name, row < 0 ? "COST" : model.cons[static_cast<std::size_t>(row)].name,
                         coef);
        if (columns[j].empty()) // declare the column so bounds can refer to it
            append_entry(out, var.name, "COST", 0.0);
    }
    if (in_integer_block)
        out += "    MARKER" + std::to_string(marker++) + "    'MARKER'    'INTEND'\n";

    out += "RHS\n";
    for (const Constraint& row : model.cons)
        if (row.rhs != 0.0)
            append_entry(out, "RHS", row.name, row.rhs);

    out += "BOUNDS\n";
    for (const VarRef& var : model.vars) {
        if (var.binary) {
            out += " BV BND         " + var.name + "\n";
            continue;
        }
        const bool free_lb = std::isinf(var.lb) && var.lb < 0;
        const bool free_ub = std::isinf(var.ub) && var.ub > 0;
        if (free_lb && free_ub) {
            out += " FR BND         " + var.name + "\n";
            continue;
        }
        if (var.lb != 0.0) {
            out += " LO BND         ";
            append_field(out, var.name, 12);
            out += format_double(var.lb);
            out += '\n';
        }
        if (!free_ub) {
            out += " UP BND         ";
            append_field(out, var.name, 12);
            out += format_double(var.ub);
            out += '\n';
        }
    }
    out += "ENDATA\n";
    return out;
}

void export_mps(const MilpModel& model, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    file << export_mps(model);
    if (!file.flush())
        throw std::runtime_error("write failed for '" + path + "'");
}

SolveResult import_solution(const std::string& path, const MilpModel& model) {
    std::ifstream file(path);
    if (!file)
        throw std::runtime_error("cannot open solution file '" + path + "'");

    std::vector<double> provided(model.vars.size(), std::numeric_limits<double>::quiet_NaN());
    std::string line;
    int line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream tokens(line);
        std::string name;
        if (!(tokens >> name))
            continue;
        double value;
        if (!(tokens >> value))
            throw std::runtime_error("solution line " + std::to_string(line_no) +
                                     ": missing value for '" + name + "'");
        const int var = model.find_var(name);
        if (var < 0)
            throw std::runtime_error("solution line " + std::to_string(line_no) +
                                     ": variable '" + name + "' not in model");
        provided[static_cast<std::size_t>(var)] = value;
    }

    // snap binaries, pin the decision families, derive everything else
    std::vector<std::pair<int, double>> pins;
    int missing_decisions = 0;
    for (std::size_t j = 0; j < model.vars.size(); ++j) {
        const VarRef& var = model.vars[j];
        if (var.family != VarFamily::X && var.family != VarFamily::Y &&
            var.family != VarFamily::Z)
            continue;
        double value = provided[j];
        if (std::isnan(value)) {
            ++missing_decisions;
            value = 0.0; // missing decision variables default to off/idle
        } else if (var.binary) {
            value = value >= 0.5 - kBinarySnapTol ? 1.0 : 0.0;
        }
        pins.push_back({static_cast<int>(j), value});
    }

    const DerivedPoint point = derive_point(model, pins);
    SolveResult result;
    result.nodes = 0;
    result.bound = std::numeric_limits<double>::quiet_NaN();
    result.gap = std::numeric_limits<double>::quiet_NaN();
    if (missing_decisions > 0)
        result.message = "warning: " + std::to_string(missing_decisions) +
                         " decision variables missing, defaulted to 0; ";
    if (!point.feasible) {
        result.status = SolveStatus::Infeasible;
        result.message += "violated: ";
        for (std::size_t i = 0; i < point.violated.size(); ++i)
            result.message += (i ? ", " : "") + point.violated[i];
        return result;
    }
    result.status = SolveStatus::Feasible;
    result.schedule = schedule_from_point(model, point.values);
    result.objective = point.objective;
    return result;
}

namespace {

std::string replace_all(std::string text, const std::string& token, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string::npos) {
        text.replace(pos, token.size(), value);
        pos += value.size();
    }
    return text;
}

} // namespace

SolveResult solve_external(const MilpModel& model, const ExternalSolverConfig& config) {
    static std::atomic<int> counter{0};
    const int run = counter.fetch_add(1);
    namespace fs = std::filesystem;
    const fs::path dir = config.work_dir.empty() ? fs::temp_directory_path()
                                                 : fs::path(config.work_dir);
    fs::create_directories(dir);
    const std::string tag = std::to_string(static_cast<long long>(::getpid())) + "_" +
                            std::to_string(run);
    const fs::path mps_path = dir / ("schedopt_" + tag + ".mps");
    const fs::path sol_path = dir / ("schedopt_" + tag + ".sol");

    export_mps(model, mps_path.string());
    std::string command = replace_all(config.command_template, "{mps}", mps_path.string());
    command = replace_all(command, "{sol}", sol_path.string());
    const int rc = std::system(command.c_str());
    if (rc != 0)
        throw std::runtime_error("external solver command failed (exit " + std::to_string(rc) +
                                 "): " + command);
    if (!fs::exists(sol_path))
        throw std::runtime_error("external solver produced no solution file: " +
                                 sol_path.string());
    return import_solution(sol_path.string(), model);
}

} // namespace schedopt
