#pragma once

#include <string>

#include "ctmboost/basis.hpp"
#include "ctmboost/loss.hpp"

namespace ctm {

enum class Resampling;

/// Canonical text names for the public enums, shared by the model document
/// and the configuration document so the two dialects can never drift.
/// The *_name functions reject unknown enum values as config errors; the
/// *_from_name functions reject unknown text as parse errors.
std::string basis_kind_name(BasisKind kind);
BasisKind basis_kind_from_name(const std::string& text);

std::string penalty_kind_name(PenaltyKind kind);
PenaltyKind penalty_kind_from_name(const std::string& text);

std::string link_kind_name(LinkKind kind);
LinkKind link_kind_from_name(const std::string& text);

std::string loss_kind_name(LossKind kind);
LossKind loss_kind_from_name(const std::string& text);

std::string resampling_name(Resampling kind);
Resampling resampling_from_name(const std::string& text);

}  // namespace ctm
