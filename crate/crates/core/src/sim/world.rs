use rand::{CryptoRng, RngCore};

use super::scenario::Roster;
use crate::crypto::{AnchorKey, Digest, SymmetricKey};
use crate::protocol::{
    label_id, Amf, Ausf, DigitalTwin, Gnb, KeyDirectory, MobileDevice, ProtocolError, Role,
    SubscriberRecord,
};

/// Addressable entity in a simulated network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Ausf,
    Amf(usize),
    Gnb(usize),
    Md(usize),
    Dt(usize),
}

impl Node {
    pub fn role(self) -> Role {
        match self {
            Node::Ausf => Role::Ausf,
            Node::Amf(_) => Role::Amf,
            Node::Gnb(_) => Role::Gnb,
            Node::Md(_) => Role::Md,
            Node::Dt(_) => Role::Dt,
        }
    }

    /// Index of the MD this node acts for, if any.
    pub fn md(self) -> Option<usize> {
        match self {
            Node::Md(i) | Node::Dt(i) => Some(i),
            _ => None,
        }
    }
}

/// All protocol entities of one run plus the shared key directory.
pub struct World {
    pub ausf: Ausf,
    pub amfs: Vec<Amf>,
    pub gnbs: Vec<Gnb>,
    pub mds: Vec<MobileDevice>,
    pub dts: Vec<DigitalTwin>,
    pub dir: KeyDirectory,
    /// Current serving AMF per MD.
    pub serving: Vec<usize>,
    names: Names,
}

struct Names {
    ausf: String,
    amfs: Vec<String>,
    gnbs: Vec<String>,
    mds: Vec<String>,
}

impl World {
    /// Initialization, DT creation, and a stand-in for the initial 5G-AKA attach.
    pub fn build<R: RngCore + CryptoRng>(roster: &Roster, rng: &mut R) -> Result<Self, ProtocolError> {
        let mut ausf = Ausf::new(254, rng)?;
        let mut dir = KeyDirectory::default();
        let mut amfs = Vec::new();
        for name in &roster.amfs {
            let amf = Amf::provision(label_id(name), &mut ausf, rng)?;
            dir.publish_amf(amf.published_key());
            amfs.push(amf);
        }
        let amf_index = |name: &str| roster.amfs.iter().position(|a| a == name).expect("validated roster");
        let mut gnbs = Vec::new();
        for g in &roster.gnbs {
            let domain = amfs[amf_index(&g.amf)].id();
            let gnb = Gnb::provision(label_id(&g.name), domain, &mut ausf, rng)?;
            dir.publish_gnb(gnb.published_key(), domain);
            gnbs.push(gnb);
        }
        let mut mds = Vec::new();
        let mut dts = Vec::new();
        let mut serving = Vec::new();
        for m in &roster.mds {
            let supi = label_id(&format!("supi:{}", m.name));
            let mut md = MobileDevice::new(supi, rng);
            let rec = ausf.create_dt_identity(&supi, rng);
            let k_ij = SymmetricKey::random(rng);
            let dt = DigitalTwin::new(rec.id_j, k_ij, rng);
            dir.register_twin(rec.id_j, dt.public_key());
            dir.register_device(supi, md.public_key());
            md.pair_twin(rec.id_j, dt.public_key(), k_ij);

            let a = m.amf.as_deref().map(amf_index).unwrap_or(0);
            let k_seaf = AnchorKey::random(rng);
            let mut guti = [0u8; 16];
            rng.fill_bytes(&mut guti);
            let guti = Digest(guti);
            amfs[a].attach(
                guti,
                SubscriberRecord {
                    supi,
                    k_seaf,
                    pk_i: md.public_key(),
                },
            );
            md.attach(k_seaf, guti);
            mds.push(md);
            dts.push(dt);
            serving.push(a);
        }
        Ok(World {
            ausf,
            amfs,
            gnbs,
            mds,
            dts,
            dir,
            serving,
            names: Names {
                ausf: roster.ausf.clone(),
                amfs: roster.amfs.clone(),
                gnbs: roster.gnbs.iter().map(|g| g.name.clone()).collect(),
                mds: roster.mds.iter().map(|m| m.name.clone()).collect(),
            },
        })
    }

    pub fn name(&self, node: Node) -> String {
        match node {
            Node::Ausf => self.names.ausf.clone(),
            Node::Amf(i) => self.names.amfs[i].clone(),
            Node::Gnb(i) => self.names.gnbs[i].clone(),
            Node::Md(i) => self.names.mds[i].clone(),
            Node::Dt(i) => format!("{}/dt", self.names.mds[i]),
        }
    }

    /// Resolves an entity name; a twin is addressed as `<md>/dt`.
    pub fn node(&self, name: &str) -> Option<Node> {
        if let Some(md) = name.strip_suffix("/dt") {
            return self.names.mds.iter().position(|m| m == md).map(Node::Dt);
        }
        if name == self.names.ausf {
            return Some(Node::Ausf);
        }
        let find = |v: &Vec<String>| v.iter().position(|x| x == name);
        find(&self.names.amfs)
            .map(Node::Amf)
            .or_else(|| find(&self.names.gnbs).map(Node::Gnb))
            .or_else(|| find(&self.names.mds).map(Node::Md))
    }

    pub fn md_names(&self) -> &[String] {
        &self.names.mds
    }

    pub fn gnb_index(&self, id: &Digest) -> Option<usize> {
        self.gnbs.iter().position(|g| g.id() == *id)
    }

    pub fn amf_index(&self, id: &Digest) -> Option<usize> {
        self.amfs.iter().position(|a| a.id() == *id)
    }
}
