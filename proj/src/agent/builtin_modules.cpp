#include "dialogos/agent/agent.hpp"
#include "dialogos/slotfill/modules.hpp"
#include "dialogos/usersim/user_module.hpp"

namespace dialogos {

const ModuleRegistry& ModuleRegistry::builtin() {
    static const ModuleRegistry registry = [] {
        ModuleRegistry r;
        r.add("identity", [] { return std::make_unique<IdentityModule>(); });
        r.add("slot_filling_nlu", [] { return std::make_unique<SlotFillingNluModule>(); });
        r.add("slot_filling_dst", [] { return std::make_unique<SlotFillingDstModule>(); });
        r.add("joint_nlu_dst", [] { return std::make_unique<JointNluDstModule>(); });
        r.add("slot_filling_policy", [] { return std::make_unique<SlotFillingPolicyModule>(); });
        r.add("slot_filling_nlg", [] { return std::make_unique<SlotFillingNlgModule>(); });
        r.add("q_learning_policy", [] { return std::make_unique<LearnedPolicyModule>(LearnerKind::q_learning); });
        r.add("reinforce_policy", [] { return std::make_unique<LearnedPolicyModule>(LearnerKind::reinforce); });
        r.add("random_policy", [] { return std::make_unique<LearnedPolicyModule>(LearnerKind::random); });
        r.add(AgendaSimulator::kStreamName, [] { return std::make_unique<AgendaBasedUsModule>(); });
        return r;
    }();
    return registry;
}

}  // namespace dialogos
