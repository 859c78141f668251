import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Sweep',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(blank=True, max_length=255, verbose_name='Scenario Name')),
                ('mode', models.CharField(choices=[('coded_demixing', 'Coded Demixing'), ('tin', 'Tin'), ('sic', 'Sic')], max_length=20, verbose_name='Receiver Mode')),
                ('axis', models.CharField(choices=[('ebno', 'Eb/N0 (dB)'), ('k', 'Number of users')], max_length=4, verbose_name='Axis')),
                ('bins', models.PositiveIntegerField(default=1, verbose_name='Bins')),
                ('trials', models.PositiveIntegerField(verbose_name='Trials per Point')),
                ('seed', models.BigIntegerField(verbose_name='Master Seed')),
                ('scenario', models.JSONField(verbose_name='Scenario')),
                ('diverged', models.PositiveIntegerField(default=0, verbose_name='Diverged Trials')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Created At')),
            ],
            options={
                'verbose_name': 'Sweep',
                'verbose_name_plural': 'Sweeps',
                'ordering': ['-created_at', '-id'],
            },
        ),
        migrations.CreateModel(
            name='ThresholdRun',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(blank=True, max_length=255, verbose_name='Scenario Name')),
                ('mode', models.CharField(choices=[('coded_demixing', 'Coded Demixing'), ('tin', 'Tin'), ('sic', 'Sic')], max_length=20, verbose_name='Receiver Mode')),
                ('bins', models.PositiveIntegerField(default=1, verbose_name='Bins')),
                ('target', models.FloatField(verbose_name='Target PUPE')),
                ('ebno_db', models.FloatField(verbose_name='Required Eb/N0 (dB)')),
                ('low', models.FloatField(verbose_name='Bracket Low')),
                ('high', models.FloatField(verbose_name='Bracket High')),
                ('resolved', models.BooleanField(default=True, verbose_name='Resolved')),
                ('scenario', models.JSONField(verbose_name='Scenario')),
                ('evaluations', models.JSONField(default=list, verbose_name='Evaluations')),
                ('created_at', models.DateTimeField(auto_now_add=True, verbose_name='Created At')),
            ],
            options={
                'verbose_name': 'Threshold Run',
                'verbose_name_plural': 'Threshold Runs',
                'ordering': ['-created_at', '-id'],
            },
        ),
        migrations.CreateModel(
            name='SweepPoint',
            fields=[
                ('id', models.AutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('axis_value', models.FloatField(verbose_name='Axis Value')),
                ('group_id', models.CharField(max_length=10, verbose_name='Group')),
                ('pupe', models.FloatField(verbose_name='PUPE')),
                ('md', models.FloatField(verbose_name='Missed Detection')),
                ('fa', models.FloatField(verbose_name='False Alarm')),
                ('trials', models.PositiveIntegerField(verbose_name='Trials')),
                ('errors', models.PositiveIntegerField(default=0, verbose_name='Missed Messages')),
                ('sent', models.PositiveIntegerField(default=0, verbose_name='Sent Messages')),
                ('ci_lo', models.FloatField(verbose_name='CI Lower')),
                ('ci_hi', models.FloatField(verbose_name='CI Upper')),
                ('sweep', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='points', to='ura.sweep', verbose_name='Sweep')),
            ],
            options={
                'verbose_name': 'Sweep Point',
                'verbose_name_plural': 'Sweep Points',
                'ordering': ['sweep', 'axis_value', 'id'],
            },
        ),
    ]
