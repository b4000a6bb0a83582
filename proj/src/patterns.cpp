#include "katena/patterns.hpp"

#include "katena/errors.hpp"

#include <algorithm>
#include <set>

namespace katena::patterns {

using model::NodeKind;
using model::Relation;

std::string cut_action_name(CutAction action) {
    switch (action) {
        case CutAction::Add: return "add";
        case CutAction::Replace: return "replace";
        case CutAction::Remove: return "remove";
    }
    return "?";
}

std::vector<std::string> facet_selectors(const model::ContractArtifact& facet_artifact,
                                         const std::vector<std::string>& exclude,
                                         std::vector<std::string>* warnings) {
    if (facet_artifact.functions.empty()) {
        throw validation_error("facet ABI '" + facet_artifact.contract_name +
                               "' declares no functions");
    }
    std::set<std::string> known_names;
    for (const auto& fn : facet_artifact.functions) known_names.insert(fn.name);
    std::set<std::string> excluded(exclude.begin(), exclude.end());
    if (warnings) {
        for (const auto& name : exclude) {
            if (!known_names.contains(name)) {
                warnings->push_back("exclude entry '" + name + "' is not a function of '" +
                                    facet_artifact.contract_name + "'");
            }
        }
    }
    std::set<std::string> selectors;
    for (const auto& fn : facet_artifact.functions) {
        if (excluded.contains(fn.name)) continue;
        selectors.insert(fn.selector_hex());
    }
    return {selectors.begin(), selectors.end()};
}

DiamondWiring plan_diamond_wiring(const model::NodeInstance& diamond,
                                  const model::DeploymentModel& deployment,
                                  const model::ArtifactStore& artifacts) {
    if (diamond.kind != NodeKind::Diamond) {
        throw usage_error("node '" + diamond.name + "' is not a diamond");
    }
    auto cut_reqs = diamond.requirements_of(Relation::UseCut);
    if (cut_reqs.size() != 1) {
        throw validation_error("diamond '" + diamond.name + "' must declare exactly one useCut " +
                               "requirement, found " + std::to_string(cut_reqs.size()));
    }

    DiamondWiring wiring;
    std::vector<const model::Requirement*> facet_reqs =
        diamond.requirements_of(Relation::UseFacet);
    std::sort(facet_reqs.begin(), facet_reqs.end(),
              [](const model::Requirement* a, const model::Requirement* b) {
                  return a->target < b->target;
              });

    std::map<std::string, std::string> owner;  // selector -> facet
    for (const auto* req : facet_reqs) {
        const auto& facet_node = deployment.node(req->target);
        const auto& facet_artifact = artifacts.get(facet_node.abi_ref);
        FacetCut cut;
        cut.facet = req->target;
        cut.action = CutAction::Add;
        cut.selectors = facet_selectors(facet_artifact, req->exclude, &wiring.warnings);
        for (const auto& sel : cut.selectors) {
            auto [it, inserted] = owner.emplace(sel, req->target);
            if (!inserted && it->second != req->target) {
                throw validation_error("diamond '" + diamond.name + "': facets '" + it->second +
                                       "' and '" + req->target +
                                       "' both export selector 0x" + sel);
            }
        }
        wiring.cuts.push_back(std::move(cut));
    }

    if (const auto* init_req = diamond.first_requirement(Relation::UseInit)) {
        wiring.init_target = init_req->target;
        wiring.warnings.push_back("diamondInit '" + init_req->target +
                                  "' is modelled but its initialization call is not executed");
    }
    return wiring;
}

FacetCut plan_facet_removal(const std::string& facet,
                            const std::vector<std::string>& routed_selectors) {
    if (routed_selectors.empty()) {
        throw plan_error("facet '" + facet + "' is not attached to the diamond");
    }
    FacetCut cut;
    cut.facet = facet;
    cut.action = CutAction::Remove;
    cut.selectors = routed_selectors;
    std::sort(cut.selectors.begin(), cut.selectors.end());
    return cut;
}

std::vector<FacetCut> plan_facet_upgrade(const std::string& facet,
                                         const std::vector<std::string>& routed_selectors,
                                         const std::vector<std::string>& new_selectors) {
    std::set<std::string> before(routed_selectors.begin(), routed_selectors.end());
    std::set<std::string> after(new_selectors.begin(), new_selectors.end());

    FacetCut remove{facet, CutAction::Remove, {}};
    FacetCut replace{facet, CutAction::Replace, {}};
    FacetCut add{facet, CutAction::Add, {}};
    for (const auto& sel : before) {
        (after.contains(sel) ? replace : remove).selectors.push_back(sel);
    }
    for (const auto& sel : after) {
        if (!before.contains(sel)) add.selectors.push_back(sel);
    }

    std::vector<FacetCut> cuts;
    if (!remove.selectors.empty()) cuts.push_back(std::move(remove));
    if (!replace.selectors.empty()) cuts.push_back(std::move(replace));
    if (!add.selectors.empty()) cuts.push_back(std::move(add));
    return cuts;
}

CallDescriptor wire_proxy(const model::NodeInstance& proxy,
                          const model::ContractArtifact& proxy_artifact) {
    const std::string& fn_name = proxy.upgrade_function;
    const auto* fn = proxy_artifact.find_function(fn_name, 1);
    if (!fn || fn->inputs[0].kind != abi::Type::Kind::AddressTy) {
        throw validation_error("proxy '" + proxy.name + "': ABI has no " + fn_name +
                               "(address) function");
    }
    return {fn->name, fn->signature(), fn->selector_hex()};
}

CallDescriptor cut_call_descriptor(const model::ContractArtifact& cut_artifact) {
    auto named = cut_artifact.functions_named("diamondCut");
    if (named.empty()) {
        throw validation_error("cut facet ABI '" + cut_artifact.contract_name +
                               "' has no diamondCut function");
    }
    // With overloads, prefer the canonical three-argument form.
    const model::AbiFunction* chosen = named[0];
    for (const auto* fn : named) {
        if (fn->inputs.size() == 3) chosen = fn;
    }
    return {chosen->name, chosen->signature(), chosen->selector_hex()};
}

}  // namespace katena::patterns
