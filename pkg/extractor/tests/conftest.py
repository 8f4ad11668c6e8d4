import pytest
import torch
from tokenizers.implementations import BertWordPieceTokenizer
from transformers import BertConfig, BertForMaskedLM, BertTokenizerFast

# Enough wordpieces to tokenize the template scaffolding; everything else
# falls back to [UNK], which still aligns to character spans.
VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "is", "a", "type", "of", "and", "in", "the", "list", "codes",
    "mental", "health", "disorder", "disorders", "diagnosis",
    "sexually", "transmitted", "disease", "personality", "traits",
    "icd", "cm", "-", "9", "'", "s", ".", ",", "/",
    "she", "he", "her", "his", "woman", "man", "girl", "boy",
    "mother", "father", "daughter", "son", "female", "male", "gal", "guy",
    "mary", "john", "herself", "himself", "person", "anxiety", "depression",
    "##s", "##ing", "##ed", "old", "pt", "admitted", "for", "with", "was",
]


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A seeded, saved-to-disk masked LM small enough for full-lexicon runs."""
    model_dir = tmp_path_factory.mktemp("tiny-mlm")
    backend = BertWordPieceTokenizer(vocab={t: i for i, t in enumerate(VOCAB)}, lowercase=True)
    tokenizer = BertTokenizerFast(tokenizer_object=backend._tokenizer)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=128,
    )
    torch.manual_seed(20240807)
    model = BertForMaskedLM(config)
    model.eval()
    tokenizer.save_pretrained(str(model_dir))
    model.save_pretrained(str(model_dir))
    return str(model_dir)
