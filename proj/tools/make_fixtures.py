#!/usr/bin/env python3
"""Writes the fixture corpus under fixtures/<name>/.

All link frames are world-aligned at the neutral configuration, so joint
axes are given in world coordinates and every closure is satisfied at q = 0.
"""
import json
import math
import pathlib
import sys

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def fmt(x):
    x = float(x)
    if x == 0.0:
        return "0"
    return repr(x)


def vec(v):
    return " ".join(fmt(c) for c in v)


class Robot:
    def __init__(self, name):
        self.name = name
        self.links = []
        self.joints = []
        self.world = {}

    def link(self, name, mass=None, inertia=None, com=(0, 0, 0)):
        self.links.append((name, mass, inertia, com))
        return name

    def joint(self, name, kind, parent, child, xyz, axis=(1, 0, 0), limits=None):
        self.joints.append((name, kind, parent, child, tuple(xyz), tuple(axis), limits))
        self.world[child] = self.world.get(parent, np.zeros(3)) + np.asarray(xyz, float)

    def body(self, name, parent, joint, kind, at_world, axis=(1, 0, 0), mass=1.0,
             size=0.1, limits=None):
        """Adds link `name` on a joint placed at world point `at_world`."""
        i = mass * size * size / 6.0
        self.link(name, mass, (i, i, i))
        if kind in ("revolute", "prismatic") and limits is None:
            limits = (-1.5, 1.5)
        self.joint(joint, kind, parent, name,
                   np.asarray(at_world, float) - self.world[parent], axis, limits)
        return name

    def ghost(self, name, parent, joint, kind, at_world, axis, limits=(-1.5, 1.5)):
        """Massless intermediate link."""
        self.link(name)
        self.joint(joint, kind, parent, name,
                   np.asarray(at_world, float) - self.world[parent], axis, limits)
        return name

    def frame(self, name, parent, at_world):
        self.link(name)
        self.joint(name + "_joint", "fixed", parent, name,
                   np.asarray(at_world, float) - self.world[parent])
        return name

    def ball(self, prefix, parent, at_world, child, mass=0.2, size=0.1):
        """Three concurrent revolutes x, y, z ending in body `child`."""
        a = self.ghost(prefix + "_l1", parent, prefix + "_x", "revolute", at_world, (1, 0, 0))
        b = self.ghost(prefix + "_l2", a, prefix + "_y", "revolute", at_world, (0, 1, 0))
        return self.body(child, b, prefix + "_z", "revolute", at_world, (0, 0, 1), mass, size)

    def xml(self):
        out = ['<?xml version="1.0"?>', f'<robot name="{self.name}">']
        for name, mass, inertia, com in self.links:
            if mass is None:
                out.append(f'  <link name="{name}"/>')
                continue
            ixx, iyy, izz = inertia
            out += [f'  <link name="{name}">',
                    "    <inertial>",
                    f'      <origin xyz="{vec(com)}" rpy="0 0 0"/>',
                    f'      <mass value="{fmt(mass)}"/>',
                    f'      <inertia ixx="{fmt(ixx)}" ixy="0" ixz="0" iyy="{fmt(iyy)}" iyz="0" izz="{fmt(izz)}"/>',
                    "    </inertial>",
                    "  </link>"]
        for name, kind, parent, child, xyz, axis, limits in self.joints:
            out += [f'  <joint name="{name}" type="{kind}">',
                    f'    <parent link="{parent}"/>',
                    f'    <child link="{child}"/>',
                    f'    <origin xyz="{vec(xyz)}" rpy="0 0 0"/>']
            if kind != "fixed":
                out.append(f'    <axis xyz="{vec(axis)}"/>')
            if limits is not None:
                out.append(f'    <limit lower="{fmt(limits[0])}" upper="{fmt(limits[1])}" '
                           'effort="100" velocity="10"/>')
            out.append("  </joint>")
        out.append("</robot>")
        return "\n".join(out) + "\n"


def write(name, robot, yaml_text, expect):
    d = ROOT / name
    d.mkdir(parents=True, exist_ok=True)
    (d / "robot.urdf").write_text(robot.xml())
    if yaml_text is not None:
        (d / "robot.yaml").write_text(yaml_text)
    expect = dict(expect)
    expect["name"] = name
    expect["internal_mobilities"] = expect["n_v"] - expect["rank_k"] - expect["n_actuated"]
    (d / "expect.json").write_text(json.dumps(expect, indent=2) + "\n")


def closures_yaml(closures, actuated, replacements=()):
    lines = []
    if closures:
        lines.append("closed_loop:")
        for cid, kind in closures:
            lines += [f"  - name: {cid}", f"    type: {kind}",
                      f"    link_1: closure_{kind.lower()}_{cid}_A",
                      f"    link_2: closure_{kind.lower()}_{cid}_B"]
    else:
        lines.append("closed_loop: []")
    if actuated:
        lines.append("actuated:")
        lines += [f"  - {j}" for j in actuated]
    else:
        lines.append("actuated: []")
    if replacements:
        lines.append("joint_replacements:")
        for key in replacements:
            k = key if isinstance(key, str) else "[" + ", ".join(key) + "]"
            lines.append(f"  {k}: spherical")
    else:
        lines.append("joint_replacements: {}")
    return "\n".join(lines) + "\n"


def findings(errors=(), warnings=()):
    return {"errors": list(errors), "warnings": list(warnings)}


def four_bar():
    r = Robot("four_bar")
    r.link("ground", 2.0, (0.02, 0.02, 0.02))
    r.world["ground"] = np.zeros(3)
    o = np.zeros(3)
    d = np.array([4.0, 0.0, 0.0])
    b = np.array([0.0, 1.0, 0.0])
    # coupler end: |c - b| = 4, |c - d| = 3, upper branch
    dist = np.linalg.norm(d - b)
    a = (16.0 - 9.0 + dist * dist) / (2 * dist)
    h = math.sqrt(16.0 - a * a)
    e = (d - b) / dist
    n = np.array([-e[1], e[0], 0.0])
    c = b + a * e + h * n
    z = (0, 0, 1)
    r.body("crank", "ground", "motor_crank", "revolute", o, z, 0.5, 0.2, (-math.pi, math.pi))
    r.body("coupler", "crank", "coupler_joint", "revolute", b, z, 1.0, 0.4, (-math.pi, math.pi))
    r.body("rocker", "ground", "rocker_joint", "revolute", d, z, 0.8, 0.3, (-math.pi, math.pi))
    r.frame("closure_3d_loop_A", "coupler", c)
    r.frame("closure_3d_loop_B", "rocker", c)
    yaml_text = closures_yaml([("loop", "3D")], ["motor_crank"])
    write("four_bar", r, yaml_text,
          dict(floating_base=False, n_q=3, n_v=3, m=3, rank_k=2, n_actuated=1,
               tolerance=1e-8, findings=findings()))


def gimbal_arm(r, g):
    r.body("arm_1", "base", "arm_1", "revolute", (0, 0, 0.1), (0, 0, 1), 0.6, 0.1)
    r.body("arm_2", "arm_1", "arm_2", "revolute", (0, 0, 0.3), (0, 1, 0), 0.4, 0.25)
    return r.body("tip", "arm_2", "arm_3", "revolute", (0.25, 0, 0.3), (0, 1, 0), 0.2, 0.1)


def gimbal():
    g = np.array([0.3, 0.0, 0.2])
    r = Robot("gimbal")
    r.link("base", 3.0, (0.05, 0.05, 0.05))
    r.world["base"] = np.zeros(3)
    r.ghost("gimbal_l1", "base", "gimbal_x", "revolute", g, (1, 0, 0))
    r.ghost("gimbal_l2", "gimbal_l1", "gimbal_y", "revolute", g, (0, 1, 0))
    r.body("ball_body", "gimbal_l2", "gimbal_z", "revolute", g, (0, 0, 1), 0.3, 0.08)
    r.frame("closure_6d_ball_A", "ball_body", g)
    tip = gimbal_arm(r, g)
    r.frame("closure_6d_ball_B", tip, g)
    write("gimbal", r, closures_yaml([("ball", "6D")], []),
          dict(floating_base=False, n_q=7, n_v=6, m=6, rank_k=6, n_actuated=0,
               tolerance=1e-8, findings=findings(warnings=["NoActuation"])))

    r = Robot("gimbal_3d")
    r.link("base", 3.0, (0.05, 0.05, 0.05))
    r.world["base"] = np.zeros(3)
    r.frame("closure_3d_ball_A", "base", g)
    tip = gimbal_arm(r, g)
    r.frame("closure_3d_ball_B", tip, g)
    write("gimbal_3d", r, closures_yaml([("ball", "3D")], []),
          dict(floating_base=False, n_q=3, n_v=3, m=3, rank_k=3, n_actuated=0,
               tolerance=1e-8, findings=findings(warnings=["NoActuation"])))


def serial_2r():
    r = Robot("serial_2r")
    r.link("base", 1.0, (0.01, 0.01, 0.01))
    r.world["base"] = np.zeros(3)
    z = (0, 0, 1)
    r.body("link_1", "base", "joint_1", "revolute", (0, 0, 0), z, 1.0, 0.3, (-math.pi, math.pi))
    r.body("link_2", "link_1", "joint_2", "revolute", (1, 0, 0), z, 1.0, 0.3, (-math.pi, math.pi))
    r.frame("tip", "link_2", (2, 0, 0))
    write("serial_2r", r, None,
          dict(floating_base=False, n_q=2, n_v=2, m=0, rank_k=0, n_actuated=0,
               tolerance=1e-8, findings=findings()))


def infeasible():
    r = Robot("infeasible")
    r.link("base", 1.0, (0.01, 0.01, 0.01))
    r.world["base"] = np.zeros(3)
    r.body("arm", "base", "joint_1", "revolute", (0, 0, 0), (0, 0, 1), 1.0, 0.3)
    r.frame("closure_3d_weld_A", "base", (0, 0, 0))
    r.frame("closure_3d_weld_B", "base", (1, 0, 0))
    write("infeasible", r, closures_yaml([("weld", "3D")], []),
          dict(floating_base=False, n_q=1, n_v=1, m=3, rank_k=0, n_actuated=0,
               tolerance=1e-8, projectable=False,
               findings=findings(warnings=["ClosureFrameCoincident", "NoActuation"])))


def sdf_cases():
    r = Robot("sdf_leaf")
    r.link("base", 1.0, (0.01, 0.01, 0.01))
    r.world["base"] = np.zeros(3)
    r.body("arm", "base", "joint_1", "revolute", (0, 0, 0), (0, 0, 1), 1.0, 0.3)
    r.link("sensor", 0.0, (0.0, 0.0, 0.0))
    r.joint("sensor_joint", "fixed", "arm", "sensor", (0.3, 0, 0))
    write("sdf_leaf", r, closures_yaml([], []),
          dict(floating_base=False, n_q=1, n_v=1, m=0, rank_k=0, n_actuated=0,
               tolerance=1e-8, findings=findings(warnings=["ZeroInertiaBody"])))

    r = Robot("sdf_midchain")
    r.link("base", 1.0, (0.01, 0.01, 0.01))
    r.world["base"] = np.zeros(3)
    r.link("hollow", 0.0, (0.0, 0.0, 0.0))
    r.joint("joint_1", "revolute", "base", "hollow", (0, 0, 0.1), (0, 0, 1), (-1.5, 1.5))
    r.frame("tool", "hollow", (0.3, 0, 0.1))
    write("sdf_midchain", r, closures_yaml([], []),
          dict(floating_base=False, n_q=1, n_v=1, m=0, rank_k=0, n_actuated=0,
               tolerance=1e-8,
               findings=findings(errors=["InertiaNotPositive"], warnings=["ZeroInertiaBody"])))


def rod_loop(r, cid, mount, motor_at, motor_axis, crank, rod, target):
    """motor -> crank -> ball -> rod -> ball -> rod end, welded to `target`."""
    motor_at = np.asarray(motor_at, float)
    s1 = motor_at + np.asarray(crank, float)
    s2 = s1 + np.asarray(rod, float)
    r.body(cid + "_crank", mount, "motor_" + cid, "revolute", motor_at, motor_axis, 0.3, 0.08)
    r.ball(cid + "_ball_top", cid + "_crank", s1, cid + "_rod", 0.15, 0.3)
    r.ball(cid + "_ball_bottom", cid + "_rod", s2, cid + "_rod_end", 0.02, 0.02)
    r.frame(f"closure_6d_{cid}_A", cid + "_rod_end", s2)
    r.frame(f"closure_6d_{cid}_B", target, s2)


def digit_leg():
    r = Robot("digit_leg")
    r.link("pelvis", 8.0, (0.1, 0.1, 0.1))
    r.world["pelvis"] = np.zeros(3)
    x, y, z = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    r.body("hip_roll_link", "pelvis", "motor_hip_roll", "revolute", (0, 0, 0), x, 1.0, 0.1)
    r.body("hip_yaw_link", "hip_roll_link", "motor_hip_yaw", "revolute", (0, 0, -0.05), z, 1.0, 0.1)
    r.body("thigh", "hip_yaw_link", "motor_hip_pitch", "revolute", (0, 0, -0.1), y, 4.0, 0.4)
    r.body("shin", "thigh", "knee", "revolute", (0, 0, -0.5), y, 2.0, 0.4)
    r.body("toe_link", "shin", "toe_pitch", "revolute", (0, 0, -0.9), y, 0.1, 0.05)
    r.body("foot", "toe_link", "toe_roll", "revolute", (0, 0, -0.9), x, 0.6, 0.2)
    rod_loop(r, "knee", "thigh", (0, 0, -0.2), y, (0.06, 0, 0), (0, 0, -0.3), "shin")
    rod_loop(r, "toe_a", "shin", (0, 0.04, -0.6), y, (0.06, 0, 0), (0, 0, -0.3), "foot")
    rod_loop(r, "toe_b", "shin", (0, -0.04, -0.6), y, (0.06, 0, 0), (0, 0, -0.3), "foot")
    actuated = [j[0] for j in r.joints if j[0].startswith("motor_")]
    yaml_text = closures_yaml([("knee", "6D"), ("toe_a", "6D"), ("toe_b", "6D")], actuated)
    write("digit_leg", r, yaml_text,
          dict(floating_base=False, n_q=33, n_v=27, m=18, rank_k=18, n_actuated=6,
               tolerance=1e-8, findings=findings()))


def unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


def kangaroo_leg():
    r = Robot("kangaroo_leg")
    r.link("pelvis", 10.0, (0.15, 0.15, 0.15))
    r.world["pelvis"] = np.zeros(3)
    x, y, z = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    r.body("hip_yaw_link", "pelvis", "hip_yaw", "revolute", (0, 0, -0.1), z, 1.0, 0.1)
    r.body("hip_roll_link", "hip_yaw_link", "hip_roll", "revolute", (0, 0, -0.15), x, 1.0, 0.1)
    r.body("thigh", "hip_roll_link", "hip_pitch", "revolute", (0, 0, -0.15), y, 4.0, 0.4)
    r.body("shin", "thigh", "knee", "revolute", (0, 0, -0.55), y, 2.0, 0.4)
    r.body("ankle_link", "shin", "ankle_pitch", "revolute", (0, 0, -0.95), y, 0.1, 0.05)
    r.body("foot", "ankle_link", "ankle_roll", "revolute", (0, 0, -0.95), x, 0.6, 0.2)

    # (leg body, attachment point, rod vector from the attachment up to the bellcrank, style)
    rods = [
        ("hip_yaw_link", (0.08, 0.05, -0.12), (0.0, 0.25, 0.1), "6D"),
        ("hip_roll_link", (0.0, 0.08, -0.2), (0.05, 0.0, 0.3), "3D"),
        ("thigh", (0.08, 0.0, -0.25), (0.0, 0.05, 0.3), "6D"),
        ("shin", (0.08, 0.0, -0.6), (0.0, -0.05, 0.45), "3D"),
        ("foot", (0.08, 0.04, -0.95), (0.0, 0.03, 0.8), "6D"),
        ("foot", (0.08, -0.04, -0.95), (0.0, -0.03, 0.8), "3D"),
    ]
    replacements = []
    closures = []
    actuated = []
    for i, (leg_body, p, up, style) in enumerate(rods, start=1):
        p = np.asarray(p, float)
        top = p + np.asarray(up, float)
        u = unit(up)
        w = unit(np.cross(u, (0.3, 1.0, 0.2)))
        a = unit(np.cross(w, u))
        pivot = top - 0.06 * w
        arm = pivot + 0.06 * u
        act_base = arm + 0.3 * w
        crank = f"bellcrank_{i}"
        r.body(crank, "pelvis", f"bellcrank_{i}_joint", "revolute", pivot, a, 0.2, 0.08)

        # linear actuator: pelvis ball, cylinder, piston pushing on the bellcrank
        r.body(f"act{i}_cylinder", "pelvis", f"act{i}_ball", "continuous", act_base, z, 0.4, 0.2)
        replacements.append(f"act{i}_ball")
        r.body(f"act{i}_piston", f"act{i}_cylinder", f"motor_act{i}", "prismatic", act_base,
               -w, 0.2, 0.2, (-0.1, 0.1))
        actuated.append(f"motor_act{i}")
        r.frame(f"closure_3d_act{i}_A", f"act{i}_piston", arm)
        r.frame(f"closure_3d_act{i}_B", crank, arm)
        closures.append((f"act{i}", "3D"))

        r.ball(f"rod{i}_top", crank, top, f"rod{i}", 0.1, 0.3)
        if style == "6D":
            r.ball(f"rod{i}_bottom", f"rod{i}", p, f"rod{i}_end", 0.02, 0.02)
            replacements.append((f"rod{i}_bottom_x", f"rod{i}_bottom_y", f"rod{i}_bottom_z"))
            r.frame(f"closure_6d_rod{i}_A", f"rod{i}_end", p)
            r.frame(f"closure_6d_rod{i}_B", leg_body, p)
        else:
            r.frame(f"closure_3d_rod{i}_A", f"rod{i}", p)
            r.frame(f"closure_3d_rod{i}_B", leg_body, p)
        closures.append((f"rod{i}", style))
    closures.sort()
    write("kangaroo_leg", r, closures_yaml(closures, actuated, replacements),
          dict(floating_base=False, n_q=78, n_v=63, m=45, rank_k=45, n_actuated=6,
               tolerance=1e-8, findings=findings()))


def main():
    four_bar()
    gimbal()
    serial_2r()
    infeasible()
    sdf_cases()
    digit_leg()
    kangaroo_leg()
    return 0


if __name__ == "__main__":
    sys.exit(main())
