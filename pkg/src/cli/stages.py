"""Pipeline stages; each reads and writes files under one output directory."""

import copy
import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from src.augment.augmenter import augment_training_set, check_leakage, load_augmented, write_augmented
from src.augment.planner import DEBT_NAMES, ClassDistribution, PlanScope, entropy_balance, plan_augmentation
from src.augment.tables import render_markdown as render_tables, reproduce_tables
from src.categorizer.model import LABEL_ORDER, CategorizerConfig
from src.categorizer.trainer import TrainedCategorizer, predict_type, train_categorizer
from src.categorizer.two_step import two_step_classify
from src.cli.manifest import RunManifest
from src.corpus.io import load_dataset, write_dataset
from src.corpus.schema import (
    ArtifactSource,
    BinaryLabel,
    LabeledInstance,
    SatdLabel,
    SplitBundle,
    class_counts,
    dataset_fingerprint,
    filter_source,
    is_debt,
    only_debt,
    to_binary,
)
from src.corpus.split import PARTS, stratified_split
from src.errors import DegenerateDistribution, EmptyDistribution, LeakageError
from src.gateway import GatewayConfig, build_gateway
from src.identifier.embeddings import build_embedding_matrix
from src.identifier.model import IdentifierConfig
from src.identifier.trainer import TrainedIdentifier, predict_binary, train_identifier
from src.identifier.vocab import build_vocabulary
from src.keywords.embedders import build_embedder
from src.keywords.extractor import KeywordQuery, keyword_tables, write_keywords
from src.metrics.report import (
    comparison_table,
    comparison_to_json,
    render_comparison,
    render_markdown,
    reports_to_json,
)
from src.metrics.scores import MetricReport, f1_scores
from src.preprocess.text import PreprocessConfig, deduplicate, preprocess_text

logger = logging.getLogger(__name__)

NOT_SATD = SatdLabel.NOT_SATD.value
BASELINE = 'baseline'
AUGMENTED = 'augmented'
VARIANTS = (BASELINE, AUGMENTED)
IDENTIFICATION_LABELS = (NOT_SATD, BinaryLabel.SATD.value)
TWO_STEP_LABELS = (*LABEL_ORDER, NOT_SATD)


class Pipeline:
    """Runs the stages of one experiment against an output directory."""

    def __init__(
        self,
        config: Dict,
        out_dir,
        seeds: Dict[str, int],
        manifest: RunManifest,
        artifact: Optional[ArtifactSource] = None,
        audit=None,
    ):
        self.config = config
        self.out = Path(out_dir)
        self.seeds = seeds
        self.manifest = manifest
        self.artifact = artifact
        self.audit = audit
        self.preprocess_config = PreprocessConfig.from_config(config.get('preprocess'))
        self.ratios = tuple(config['corpus']['ratios'])

    # paths
    @property
    def dataset_path(self) -> Path:
        return self.out / 'dataset.csv'

    def split_path(self, part: str) -> Path:
        return self.out / 'splits' / f"{part}.csv"

    @property
    def augmented_path(self) -> Path:
        return self.out / 'augmented.jsonl'

    def checkpoint_dir(self, model: str, variant: str = AUGMENTED) -> Path:
        if variant == AUGMENTED:
            return self.out / 'checkpoints' / model
        return self.out / 'checkpoints' / variant / model

    @property
    def identifier_dir(self) -> Path:
        return self.checkpoint_dir('identifier')

    @property
    def categorizer_dir(self) -> Path:
        return self.checkpoint_dir('categorizer')

    # helpers
    def load_bundle(self) -> SplitBundle:
        parts = {part: load_dataset(self.split_path(part)) for part in PARTS}
        return SplitBundle(seed=self.seeds['split'], ratios=self.ratios, **parts)

    def load_paraphrases(self) -> List[LabeledInstance]:
        if not self.augmented_path.exists():
            logger.info("No augmented.jsonl, training on the original split only")
            return []
        return load_augmented(self.augmented_path)

    def _training_paraphrases(self, variant: str) -> List[LabeledInstance]:
        return [] if variant == BASELINE else self.load_paraphrases()

    def _normalized(self, instances: Sequence[LabeledInstance]) -> List[LabeledInstance]:
        return [replace(inst, text=preprocess_text(inst.text, self.preprocess_config)) for inst in instances]

    def _categorizer_view(self, instances: Sequence[LabeledInstance]) -> List[LabeledInstance]:
        if self.config['preprocess'].get('categorizer_raw_text'):
            return list(instances)
        return self._normalized(instances)

    # stages
    def ingest(self, dataset_path) -> List[LabeledInstance]:
        """Load, optionally keep one artifact source, deduplicate, write dataset.csv."""
        with self.manifest.stage('ingest') as entry:
            dataset = load_dataset(dataset_path)
            if self.artifact is not None:
                dataset = filter_source(dataset, self.artifact)
                logger.info(f"Kept {len(dataset)} {self.artifact.code} instances")
            dataset = deduplicate(dataset, self.preprocess_config)
            write_dataset(dataset, self.dataset_path)
            entry['inputs'] = {'dataset': str(dataset_path)}
            entry['outputs'] = {'dataset': str(self.dataset_path)}
            entry['details'] = {
                'instances': len(dataset),
                'counts': class_counts(dataset),
                'fingerprint': dataset_fingerprint(dataset),
            }
        return dataset

    def split(self) -> SplitBundle:
        with self.manifest.stage('split') as entry:
            dataset = load_dataset(self.dataset_path)
            bundle = stratified_split(dataset, self.ratios, seed=self.seeds['split'])
            fingerprints = {}
            for part in PARTS:
                instances = getattr(bundle, part)
                write_dataset(instances, self.split_path(part))
                fingerprints[part] = dataset_fingerprint(instances)
                entry['outputs'][part] = str(self.split_path(part))
            entry['inputs'] = {'dataset': dataset_fingerprint(dataset)}
            entry['details'] = {
                'fingerprints': fingerprints,
                'ratios': list(self.ratios),
                # splitting runs on the deduplicated dataset.csv written by ingest
                'split_after': 'deduplication',
            }
        return bundle

    def _check_augment_input(self, bundle: SplitBundle):
        train_fp = dataset_fingerprint(bundle.train)
        held_out = {dataset_fingerprint(bundle.validation), dataset_fingerprint(bundle.test)}
        split_entry = self.manifest.latest('split')
        if split_entry:
            recorded = split_entry['details']['fingerprints']
            held_out |= {recorded['validation'], recorded['test']}
        if bundle.train and train_fp in held_out:
            raise LeakageError("Augmentation input matches a validation/test fingerprint")

    def augment(self):
        """Paraphrase minority-class training instances (training split only)."""
        with self.manifest.stage('augment') as entry:
            bundle = self.load_bundle()
            self._check_augment_input(bundle)
            section = self.config['augment']

            distribution = ClassDistribution.from_instances(bundle.train, universe=[*DEBT_NAMES, NOT_SATD])
            plan = plan_augmentation(distribution, PlanScope(section['scope']))
            gateway_config = GatewayConfig.from_config(self.config['gateway'], mock_seed=self.seeds['mock'])
            gateway = build_gateway(gateway_config, audit=self.audit, max_in_flight=section['max_in_flight'])

            result = augment_training_set(
                bundle.train,
                plan,
                gateway,
                max_in_flight=section['max_in_flight'],
                max_retries=section['max_retries'],
                forbidden_ids=bundle.ids('validation') | bundle.ids('test'),
            )
            check_leakage(result.augmented, bundle)
            write_augmented(result.augmented, self.augmented_path)

            plan_path = self.out / 'plan.json'
            summary = {
                'plan': plan.to_dict(),
                'requested': result.requested,
                'generated': result.generated,
                'shortfalls': result.shortfalls,
                'requests': gateway.request_count,
            }
            plan_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + '\n', encoding='utf-8')

            entry['inputs'] = {'train': dataset_fingerprint(bundle.train)}
            entry['outputs'] = {'augmented': str(self.augmented_path), 'plan': str(plan_path)}
            entry['details'] = {**summary, 'gateway': gateway_config.to_manifest()}
        return result

    def train_identify(self, variant: str = AUGMENTED) -> TrainedIdentifier:
        """Train the identifier; the baseline variant ignores augmented.jsonl."""
        with self.manifest.stage(_stage_name('train-identify', variant)) as entry:
            bundle = self.load_bundle()
            paraphrases = self._training_paraphrases(variant)
            train = to_binary(self._normalized([*bundle.train, *paraphrases]))
            validation = to_binary(self._normalized(bundle.validation))
            config = IdentifierConfig.from_config(self.config['identifier'], seed=self.seeds['identifier'])

            vocabulary = build_vocabulary([inst.text for inst in train], config.min_frequency)
            embeddings = build_embedding_matrix(
                vocabulary, config.embedding_dim, config.embeddings_path or None, seed=self.seeds['embeddings']
            )
            splits = SplitBundle(train, validation, [], seed=self.seeds['split'], ratios=self.ratios)
            model = train_identifier(splits, embeddings, config)
            checkpoint = self.checkpoint_dir('identifier', variant)
            model.save(checkpoint)

            entry['inputs'] = {'train': len(train), 'paraphrases': len(paraphrases)}
            entry['outputs'] = {'checkpoint': str(checkpoint)}
            entry['details'] = {
                'config': config.to_dict(),
                'vocab_size': vocabulary.size,
                'embeddings': embeddings.source,
                'embedding_coverage': embeddings.coverage,
                'stopped_epoch': model.stopped_epoch,
                'epochs_run': len(model.history),
            }
        return model

    def train_categorize(self, encoder=None, tokenizer=None, variant: str = AUGMENTED) -> TrainedCategorizer:
        with self.manifest.stage(_stage_name('train-categorize', variant)) as entry:
            bundle = self.load_bundle()
            paraphrases = self._training_paraphrases(variant)
            train = only_debt(self._categorizer_view([*bundle.train, *paraphrases]))
            validation = only_debt(self._categorizer_view(bundle.validation))
            config = CategorizerConfig.from_config(self.config['categorizer'], seed=self.seeds['categorizer'])

            splits = SplitBundle(train, validation, [], seed=self.seeds['split'], ratios=self.ratios)
            model = train_categorizer(splits, config, encoder=encoder, tokenizer=tokenizer)
            checkpoint = self.checkpoint_dir('categorizer', variant)
            model.save(checkpoint)

            entry['inputs'] = {'train': len(train), 'paraphrases': len(paraphrases)}
            entry['outputs'] = {'checkpoint': str(checkpoint)}
            entry['details'] = {'config': config.to_dict(), 'best_epoch': model.best_epoch}
        return model

    def _entropy(self, bundle: SplitBundle, paraphrases: Sequence[LabeledInstance]) -> Dict[str, Dict[str, float]]:
        universe = [*DEBT_NAMES, NOT_SATD]
        original = ClassDistribution.from_instances(bundle.train, universe)
        augmented = ClassDistribution.from_instances([*bundle.train, *paraphrases], universe)
        views = {
            'identification': (original.binary(), augmented.binary()),
            'categorization': (original.restrict(DEBT_NAMES), augmented.restrict(DEBT_NAMES)),
        }
        balance = {}
        for view, (before, after) in views.items():
            try:
                balance[view] = {'original': entropy_balance(before), 'augmented': entropy_balance(after)}
            except (DegenerateDistribution, EmptyDistribution) as e:
                logger.warning(f"No entropy balance for {view}: {e}")
                balance[view] = {}
        return balance

    def _score(
        self,
        bundle: SplitBundle,
        identifier: TrainedIdentifier,
        categorizer: TrainedCategorizer,
        paraphrases: Sequence[LabeledInstance],
    ) -> Dict[str, MetricReport]:
        test = bundle.test
        id_texts = [inst.text for inst in self._normalized(test)]
        cat_texts = [inst.text for inst in self._categorizer_view(test)]
        balance = self._entropy(bundle, paraphrases)

        reports: Dict[str, MetricReport] = {}
        gold_binary = [BinaryLabel.SATD.value if is_debt(inst.label) else NOT_SATD for inst in test]
        predicted_binary = [label.value for label, _ in predict_binary(identifier, id_texts)]
        reports['identification'] = f1_scores(gold_binary, predicted_binary, IDENTIFICATION_LABELS)
        reports['identification'].entropy = balance['identification']

        debt_rows = [i for i, inst in enumerate(test) if is_debt(inst.label)]
        if debt_rows:
            predicted_types = predict_type(categorizer, [cat_texts[i] for i in debt_rows])
            reports['categorization'] = f1_scores(
                [test[i].label.value for i in debt_rows],
                [label.value for label, _ in predicted_types],
                LABEL_ORDER,
            )
            reports['categorization'].entropy = balance['categorization']
        else:
            logger.warning("Test split has no SATD instances, skipping the categorization view")

        final = two_step_classify(identifier, categorizer, id_texts, cat_texts)
        reports['two_step'] = f1_scores(
            [inst.label.value for inst in test], [label.value for label in final], TWO_STEP_LABELS
        )

        for report in reports.values():
            report.manifest_ref = self.manifest.run_id
        return reports

    def evaluate(self) -> Dict[str, MetricReport]:
        """Identification, categorization and two-step views on the test split."""
        with self.manifest.stage('evaluate') as entry:
            bundle = self.load_bundle()
            reports = self._score(
                bundle,
                TrainedIdentifier.load(self.identifier_dir),
                TrainedCategorizer.load(self.categorizer_dir),
                self.load_paraphrases(),
            )

            metrics_path = self.out / 'metrics.json'
            report_path = self.out / 'report.md'
            metrics_path.write_text(reports_to_json(reports), encoding='utf-8')
            report_path.write_text(
                '\n'.join(render_markdown(report, title=name) for name, report in reports.items()),
                encoding='utf-8',
            )
            entry['inputs'] = {'test': dataset_fingerprint(bundle.test)}
            entry['outputs'] = {'metrics': str(metrics_path), 'report': str(report_path)}
            entry['details'] = {name: report.macro_f1 for name, report in reports.items()}
        return reports

    def compare(self) -> Dict[str, Dict[str, MetricReport]]:
        """Baseline and augmented models on the same test split, next to the published rows."""
        with self.manifest.stage('compare') as entry:
            bundle = self.load_bundle()
            variants = {}
            for variant in VARIANTS:
                variants[variant] = self._score(
                    bundle,
                    TrainedIdentifier.load(self.checkpoint_dir('identifier', variant)),
                    TrainedCategorizer.load(self.checkpoint_dir('categorizer', variant)),
                    self._training_paraphrases(variant),
                )

            artifact = self.artifact.code if self.artifact is not None else None
            table = comparison_table(variants, artifact)
            json_path = self.out / 'comparison.json'
            md_path = self.out / 'comparison.md'
            json_path.write_text(comparison_to_json(variants, table, artifact), encoding='utf-8')
            md_path.write_text(render_comparison(table), encoding='utf-8')

            entry['inputs'] = {'test': dataset_fingerprint(bundle.test)}
            entry['outputs'] = {'comparison': str(json_path), 'markdown': str(md_path)}
            entry['details'] = {
                variant: {name: report.macro_f1 for name, report in reports.items()}
                for variant, reports in variants.items()
            }
        return variants

    def keywords(self):
        """Keyword tables over the ingested original dataset."""
        with self.manifest.stage('keywords') as entry:
            dataset = load_dataset(self.dataset_path)
            section = self.config['keywords']
            results = keyword_tables(dataset, build_embedder(section), section, self.preprocess_config)
            path = write_keywords(results, self.out / 'keywords.csv')
            entry['inputs'] = {'dataset': dataset_fingerprint(dataset)}
            entry['outputs'] = {'keywords': str(path)}
            query = KeywordQuery.from_config('all', section)
            entry['details'] = {
                'embedder': section.get('embedder'),
                'model': section.get('model'),
                'ngram_range': list(query.ngram_range),
                'top_k': query.top_k,
                'diversity': query.diversity,
                'groups': sorted(results),
            }
        return results

    def tables(self, dataset_path=None) -> str:
        """Whole-dataset augmentation counts and entropy balance; no training."""
        with self.manifest.stage('tables') as entry:
            counts = None
            if dataset_path is not None:
                dataset = load_dataset(dataset_path)
                counts = {}
                for source in ArtifactSource:
                    subset = filter_source(dataset, source)
                    if subset:
                        counts[source.code] = class_counts(subset)
                entry['inputs'] = {'dataset': str(dataset_path)}
            tables = reproduce_tables(counts)
            if self.artifact is not None:
                tables = [t for t in tables if t.artifact == self.artifact.code]

            markdown = render_tables(tables)
            json_path = self.out / 'tables.json'
            md_path = self.out / 'tables.md'
            json_path.write_text(
                json.dumps([t.to_dict() for t in tables], indent=2, sort_keys=True) + '\n', encoding='utf-8'
            )
            md_path.write_text(markdown, encoding='utf-8')
            entry['outputs'] = {'tables': str(json_path), 'markdown': str(md_path)}
        return markdown

    def run_all(self, dataset_path, encoder=None, tokenizer=None) -> Dict[str, MetricReport]:
        """ingest -> split -> augment -> train both models -> evaluate."""
        self.ingest(dataset_path)
        self.split()
        self.augment()
        self.train_identify()
        self.train_categorize(encoder=encoder, tokenizer=tokenizer)
        return self.evaluate()

    def ablation(self, dataset_path, encoder=None, tokenizer=None) -> Dict[str, Dict[str, MetricReport]]:
        """Train without and with paraphrases on one split, then compare both."""
        self.ingest(dataset_path)
        self.split()
        self.train_identify(variant=BASELINE)
        # fine-tuning updates a passed encoder in place
        baseline_encoder = copy.deepcopy(encoder) if encoder is not None else None
        self.train_categorize(encoder=baseline_encoder, tokenizer=tokenizer, variant=BASELINE)
        self.augment()
        self.train_identify()
        self.train_categorize(encoder=encoder, tokenizer=tokenizer)
        self.evaluate()
        return self.compare()


def _stage_name(name: str, variant: str) -> str:
    return name if variant == AUGMENTED else f"{name}-{variant}"
