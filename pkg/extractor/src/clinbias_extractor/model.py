"""Thin wrapper around a Hugging Face masked language model."""

from __future__ import annotations

from dataclasses import dataclass

import torch
from transformers import AutoModelForMaskedLM, AutoTokenizer
from transformers.utils import logging as hf_logging

hf_logging.set_verbosity_error()
hf_logging.disable_progress_bar()

MASK_MARKER = "[MASK]"


@dataclass
class EncodedSentence:
    """Per-token offsets and hidden vectors for one sentence at one layer."""

    sentence: str
    offsets: list[tuple[int, int]]
    special_mask: list[int]
    hidden: torch.Tensor  # (n_tokens, hidden_size)


class MaskedLanguageEncoder:
    """Loads a masked LM once and serves hidden states and mask-fill top-k."""

    def __init__(self, model_id: str, batch_size: int = 32):
        self.model_id = model_id
        self.batch_size = batch_size
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        if not self.tokenizer.is_fast:
            raise ValueError(f"model {model_id!r} has no fast tokenizer; offsets are required")
        self.model = AutoModelForMaskedLM.from_pretrained(model_id)
        self.model.eval()
        self.hidden_size = int(self.model.config.hidden_size)
        self.n_hidden_states = int(self.model.config.num_hidden_layers) + 1

    def resolve_layer(self, layer: int) -> int:
        """Normalize a layer index into the hidden_states tuple; -1 is the final layer."""
        n = self.n_hidden_states
        idx = layer if layer >= 0 else n + layer
        if not 0 <= idx < n:
            raise ValueError(f"layer {layer} outside the model's {n} hidden states")
        return idx

    @torch.no_grad()
    def encode(self, sentences: list[str], layer: int = -1) -> list[EncodedSentence]:
        layer_idx = self.resolve_layer(layer)
        out: list[EncodedSentence] = []
        for start in range(0, len(sentences), self.batch_size):
            batch = sentences[start : start + self.batch_size]
            enc = self.tokenizer(
                batch,
                return_tensors="pt",
                padding=True,
                truncation=True,
                return_offsets_mapping=True,
                return_special_tokens_mask=True,
            )
            offsets = enc.pop("offset_mapping")
            special = enc.pop("special_tokens_mask")
            hidden = self.model(**enc, output_hidden_states=True).hidden_states[layer_idx]
            attention = enc["attention_mask"]
            for i, sentence in enumerate(batch):
                n_tokens = int(attention[i].sum())
                out.append(
                    EncodedSentence(
                        sentence=sentence,
                        offsets=[tuple(map(int, pair)) for pair in offsets[i][:n_tokens].tolist()],
                        special_mask=[int(x) for x in special[i][:n_tokens].tolist()],
                        hidden=hidden[i, :n_tokens].to(torch.float32),
                    )
                )
        return out

    @torch.no_grad()
    def mask_topk(self, sentence: str, k: int) -> list[tuple[str, float]]:
        """Top-k (token, probability) for the single [MASK] slot, descending."""
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        n_masks = sentence.count(MASK_MARKER)
        if n_masks != 1:
            raise ValueError(f"sentence must contain exactly one {MASK_MARKER}, found {n_masks}: {sentence!r}")
        text = sentence.replace(MASK_MARKER, self.tokenizer.mask_token)
        enc = self.tokenizer(text, return_tensors="pt", truncation=True)
        mask_positions = (enc["input_ids"][0] == self.tokenizer.mask_token_id).nonzero(as_tuple=True)[0]
        if len(mask_positions) != 1:
            raise ValueError(f"mask token tokenized to {len(mask_positions)} positions in {sentence!r}")
        logits = self.model(**enc).logits[0, int(mask_positions[0])]
        probs = torch.softmax(logits.to(torch.float64), dim=-1)
        k = min(k, probs.shape[0])
        top = torch.topk(probs, k=k)
        tokens = self.tokenizer.convert_ids_to_tokens([int(i) for i in top.indices])
        return [(token, float(p)) for token, p in zip(tokens, top.values)]
