//! Token values traversing buffers.

use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use crate::value::{Address, Uint};

/// One unit of data on a buffer. `Request` tokens model incoming calls
/// (method tag plus the implicit `sender`/`value` fields); `Transfer`
/// tokens move native value. Both carry wei that the runtime debits from
/// the producer at commit and credits to the consumer at dequeue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenValue {
    Uint(Uint),
    Address(Address),
    Bool(bool),
    Request { method: String, sender: Address, value: Uint },
    Transfer { to: Address, amount: Uint },
}

impl TokenValue {
    /// Native wei carried by this token.
    pub fn native_value(&self) -> Uint {
        match self {
            TokenValue::Request { value, .. } => value.clone(),
            TokenValue::Transfer { amount, .. } => amount.clone(),
            _ => Uint::zero(),
        }
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match self {
            TokenValue::Uint(v) => {
                out.push(0);
                out.extend_from_slice(&v.to_bytes_be());
            }
            TokenValue::Address(a) => {
                out.push(1);
                out.extend_from_slice(&a.0);
            }
            TokenValue::Bool(b) => {
                out.push(2);
                out.push(u8::from(*b));
            }
            TokenValue::Request { method, sender, value } => {
                out.push(3);
                out.extend_from_slice(method.as_bytes());
                out.push(0xff);
                out.extend_from_slice(&sender.0);
                out.extend_from_slice(&value.to_bytes_be());
            }
            TokenValue::Transfer { to, amount } => {
                out.push(4);
                out.extend_from_slice(&to.0);
                out.extend_from_slice(&amount.to_bytes_be());
            }
        }
        out
    }
}

impl core::fmt::Display for TokenValue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TokenValue::Uint(v) => write!(f, "{v}"),
            TokenValue::Address(a) => write!(f, "{a}"),
            TokenValue::Bool(b) => write!(f, "{b}"),
            TokenValue::Request { method, sender, value } => {
                write!(f, "request {method}(sender={sender}, value={value})")
            }
            TokenValue::Transfer { to, amount } => write!(f, "transfer(to={to}, amount={amount})"),
        }
    }
}
