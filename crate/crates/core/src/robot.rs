//! Serial revolute manipulators with a fixed base.
//!
//! Frame conventions: each joint applies its fixed `origin` transform to the distal end
//! of the parent link (the base pose for joint 0) and then rotates about its axis by the
//! joint angle. The resulting frame is the *link frame*; the link extends `length`
//! meters along its local x-axis. Contact offsets are expressed in link frames.

use std::f64::consts::PI;

use nalgebra::{Isometry3, Translation3, Unit, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point3, Segment, Vector3};

/// Joint angles in radians, one per joint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(Vec<f64>);

impl Configuration {
    pub fn new(angles: Vec<f64>) -> Self {
        Configuration(angles)
    }

    pub fn zeros(n: usize) -> Self {
        Configuration(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Euclidean distance in joint space.
    pub fn distance(&self, other: &Configuration) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Linear interpolation `self + t (other - self)`.
    pub fn lerp(&self, other: &Configuration, t: f64) -> Configuration {
        Configuration(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        )
    }
}

impl From<Vec<f64>> for Configuration {
    fn from(v: Vec<f64>) -> Self {
        Configuration(v)
    }
}

impl std::ops::Index<usize> for Configuration {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointSpec {
    pub axis: Unit<Vector3>,
    pub origin: Isometry3<f64>,
    /// `[lo, hi]` in radians.
    pub limits: [f64; 2],
}

impl JointSpec {
    /// Revolute joint about `axis` with identity origin and the default `[-π, π]` limits.
    pub fn revolute(axis: Vector3) -> Self {
        JointSpec {
            axis: Unit::new_normalize(axis),
            origin: Isometry3::identity(),
            limits: DEFAULT_LIMITS,
        }
    }

    pub fn with_limits(mut self, lo: f64, hi: f64) -> Self {
        self.limits = [lo, hi];
        self
    }
}

pub const DEFAULT_LIMITS: [f64; 2] = [-PI, PI];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSpec {
    pub length: f64,
    pub collision_radius: f64,
}

impl LinkSpec {
    pub fn new(length: f64) -> Self {
        LinkSpec {
            length,
            collision_radius: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPointSpec {
    pub id: usize,
    pub link: usize,
    pub offset: Point3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinematicChain {
    base: Isometry3<f64>,
    joints: Vec<JointSpec>,
    links: Vec<LinkSpec>,
    contacts: Vec<ContactPointSpec>,
}

impl KinematicChain {
    pub fn new(
        base: Isometry3<f64>,
        joints: Vec<JointSpec>,
        links: Vec<LinkSpec>,
        mut contacts: Vec<ContactPointSpec>,
    ) -> Result<Self> {
        if joints.is_empty() {
            return Err(Error::InvalidChain("chain has no joints".into()));
        }
        if joints.len() != links.len() {
            return Err(Error::InvalidChain(format!(
                "{} joints but {} links",
                joints.len(),
                links.len()
            )));
        }
        for (i, j) in joints.iter().enumerate() {
            if (j.axis.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidChain(format!("joint {i} axis is not unit length")));
            }
            let [lo, hi] = j.limits;
            // lo == hi is accepted and pins the joint.
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidChain(format!(
                    "joint {i} limits [{lo}, {hi}] are not an interval"
                )));
            }
        }
        for (i, l) in links.iter().enumerate() {
            if !(l.length > 0.0) || !(l.collision_radius >= 0.0) {
                return Err(Error::InvalidChain(format!(
                    "link {i}: length must be > 0 and collision radius >= 0"
                )));
            }
        }
        contacts.sort_by_key(|c| c.id);
        for (expected, c) in contacts.iter().enumerate() {
            if c.id != expected {
                return Err(Error::InvalidChain(format!(
                    "contact ids must be 0..{} without gaps or duplicates",
                    contacts.len()
                )));
            }
            if c.link >= links.len() {
                return Err(Error::InvalidChain(format!(
                    "contact {} is attached to link {} but the chain has {} links",
                    c.id,
                    c.link,
                    links.len()
                )));
            }
        }
        Ok(KinematicChain {
            base,
            joints,
            links,
            contacts,
        })
    }

    /// Planar arm in the z = 0 plane: every joint turns about +z and every link
    /// continues from the tip of the previous one.
    pub fn planar(
        base: Point3,
        lengths: &[f64],
        contacts: Vec<ContactPointSpec>,
    ) -> Result<Self> {
        let joints = lengths.iter().map(|_| JointSpec::revolute(Vector3::z())).collect();
        let links = lengths.iter().map(|&l| LinkSpec::new(l)).collect();
        KinematicChain::new(
            Isometry3::from_parts(Translation3::from(base.coords), UnitQuaternion::identity()),
            joints,
            links,
            contacts,
        )
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn base(&self) -> &Isometry3<f64> {
        &self.base
    }

    pub fn joints(&self) -> &[JointSpec] {
        &self.joints
    }

    pub fn links(&self) -> &[LinkSpec] {
        &self.links
    }

    pub fn contacts(&self) -> &[ContactPointSpec] {
        &self.contacts
    }

    pub fn total_length(&self) -> f64 {
        self.links.iter().map(|l| l.length).sum()
    }

    fn check_dim(&self, q: &Configuration) -> Result<()> {
        if q.dim() != self.dof() {
            return Err(Error::DimensionMismatch {
                expected: self.dof(),
                got: q.dim(),
            });
        }
        Ok(())
    }

    /// Link frames (one per joint) in world coordinates.
    pub fn forward_kinematics(&self, q: &Configuration) -> Result<Vec<Isometry3<f64>>> {
        self.check_dim(q)?;
        let mut frames = Vec::with_capacity(self.dof());
        let mut parent_tip = self.base;
        for ((joint, link), &angle) in self.joints.iter().zip(&self.links).zip(q.as_slice()) {
            let rot = UnitQuaternion::from_axis_angle(&joint.axis, angle);
            let frame = parent_tip * joint.origin * rot;
            parent_tip = frame * Translation3::new(link.length, 0.0, 0.0);
            frames.push(frame);
        }
        Ok(frames)
    }

    /// World position of the distal end of the last link.
    pub fn tip_position(&self, q: &Configuration) -> Result<Point3> {
        let frames = self.forward_kinematics(q)?;
        let last = self.dof() - 1;
        Ok(frames[last] * Point3::new(self.links[last].length, 0.0, 0.0))
    }

    pub fn contact_point_world(&self, q: &Configuration, contact: usize) -> Result<Point3> {
        let spec = *self
            .contacts
            .get(contact)
            .ok_or(Error::UnknownContact(contact))?;
        let frames = self.forward_kinematics(q)?;
        Ok(frames[spec.link] * spec.offset)
    }

    /// World positions of all contact points, indexed by contact id.
    pub fn contact_points_world(&self, q: &Configuration) -> Result<Vec<Point3>> {
        let frames = self.forward_kinematics(q)?;
        Ok(self
            .contacts
            .iter()
            .map(|c| frames[c.link] * c.offset)
            .collect())
    }

    /// One collision segment per link, from its joint to its distal end.
    pub fn collision_segments(&self, q: &Configuration) -> Result<Vec<Segment>> {
        let frames = self.forward_kinematics(q)?;
        Ok(frames
            .iter()
            .zip(&self.links)
            .map(|(f, l)| {
                Segment::new(
                    f * Point3::origin(),
                    f * Point3::new(l.length, 0.0, 0.0),
                    l.collision_radius,
                )
            })
            .collect())
    }

    pub fn clamp_to_limits(&self, q: &Configuration) -> Configuration {
        Configuration(
            q.as_slice()
                .iter()
                .zip(&self.joints)
                .map(|(&a, j)| a.clamp(j.limits[0], j.limits[1]))
                .collect(),
        )
    }

    pub fn within_limits(&self, q: &Configuration) -> bool {
        q.dim() == self.dof()
            && q.as_slice()
                .iter()
                .zip(&self.joints)
                .all(|(&a, j)| a >= j.limits[0] && a <= j.limits[1])
    }
}
