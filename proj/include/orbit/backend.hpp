#pragma once

#include <string>

#include "orbit/node.hpp"
#include "orbit/topology.hpp"

namespace orbit {

/// Operations the engine issues against an emulation substrate. Lifecycle
/// contract per node: create -> start -> (suspend <-> resume)* -> destroy;
/// links may only exist between started nodes and are identified by their
/// normalized endpoint pair. Implementations throw BackendError on contract
/// violations or substrate failures. Calls may arrive from several threads
/// at once (the engine parallelizes link batches); implementations must be
/// thread-safe.
class BackendOps {
public:
    virtual ~BackendOps() = default;

    virtual void create_node(const NodeRef& node, const std::string& profile) = 0;
    virtual void start_node(const NodeRef& node) = 0;
    virtual void suspend_node(const NodeRef& node) = 0;
    virtual void resume_node(const NodeRef& node) = 0;
    virtual void destroy_node(const NodeRef& node) = 0;

    virtual void add_link(const LinkKey& link, const LinkProps& props) = 0;
    virtual void update_link(const LinkKey& link, const LinkProps& props) = 0;
    virtual void remove_link(const LinkKey& link) = 0;

    /// Short substrate identifier ("recording", "simulated", "linux-netns").
    virtual std::string name() const = 0;
};

}  // namespace orbit
