#include "ctmboost/names.hpp"

#include "ctmboost/boost.hpp"
#include "ctmboost/errors.hpp"

namespace ctm {

std::string basis_kind_name(BasisKind kind) {
  switch (kind) {
    case BasisKind::intercept: return "intercept";
    case BasisKind::linear: return "linear";
    case BasisKind::bspline: return "bspline";
    case BasisKind::cyclic_bspline: return "cyclic_bspline";
    case BasisKind::dummy: return "dummy";
  }
  fail(ErrorKind::config, "unknown basis kind");
}

BasisKind basis_kind_from_name(const std::string& text) {
  if (text == "intercept") return BasisKind::intercept;
  if (text == "linear") return BasisKind::linear;
  if (text == "bspline") return BasisKind::bspline;
  if (text == "cyclic_bspline") return BasisKind::cyclic_bspline;
  if (text == "dummy") return BasisKind::dummy;
  fail(ErrorKind::parse, "unknown basis kind '" + text + "'");
}

std::string penalty_kind_name(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::none: return "none";
    case PenaltyKind::difference: return "difference";
    case PenaltyKind::adjacency: return "adjacency";
  }
  fail(ErrorKind::config, "unknown penalty kind");
}

PenaltyKind penalty_kind_from_name(const std::string& text) {
  if (text == "none") return PenaltyKind::none;
  if (text == "difference") return PenaltyKind::difference;
  if (text == "adjacency") return PenaltyKind::adjacency;
  fail(ErrorKind::parse, "unknown penalty kind '" + text + "'");
}

std::string link_kind_name(LinkKind kind) {
  switch (kind) {
    case LinkKind::probit: return "probit";
    case LinkKind::logit: return "logit";
    case LinkKind::identity: return "identity";
  }
  fail(ErrorKind::config, "unknown link kind");
}

LinkKind link_kind_from_name(const std::string& text) {
  if (text == "probit") return LinkKind::probit;
  if (text == "logit") return LinkKind::logit;
  if (text == "identity") return LinkKind::identity;
  fail(ErrorKind::parse, "unknown link kind '" + text + "'");
}

std::string loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::bin: return "bin";
    case LossKind::sqe: return "sqe";
    case LossKind::abe: return "abe";
  }
  fail(ErrorKind::config, "unknown loss kind");
}

LossKind loss_kind_from_name(const std::string& text) {
  if (text == "bin") return LossKind::bin;
  if (text == "sqe") return LossKind::sqe;
  if (text == "abe") return LossKind::abe;
  fail(ErrorKind::parse, "unknown loss kind '" + text + "'");
}

std::string resampling_name(Resampling kind) {
  switch (kind) {
    case Resampling::none: return "none";
    case Resampling::bootstrap: return "bootstrap";
    case Resampling::kfold: return "kfold";
  }
  fail(ErrorKind::config, "unknown resampling kind");
}

Resampling resampling_from_name(const std::string& text) {
  if (text == "none") return Resampling::none;
  if (text == "bootstrap") return Resampling::bootstrap;
  if (text == "kfold") return Resampling::kfold;
  fail(ErrorKind::parse, "unknown resampling kind '" + text + "'");
}

}  // namespace ctm
