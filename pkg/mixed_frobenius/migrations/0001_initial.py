# Generated by Django 4.2.3

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='VerificationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(max_length=50)),
                ('inputs_digest', models.CharField(db_index=True, max_length=64)),
                ('passed', models.BooleanField()),
                ('order', models.PositiveIntegerField()),
                ('seed', models.IntegerField(blank=True, null=True)),
                ('report', models.JSONField(help_text='Structured report document.')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Verification Run',
                'verbose_name_plural': 'Verification Runs',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='AxiomResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=200)),
                ('passed', models.BooleanField()),
                ('certified_order', models.IntegerField(blank=True, null=True)),
                ('counterexample', models.TextField(blank=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='results', to='mixed_frobenius.verificationrun')),
            ],
            options={
                'ordering': ['id'],
            },
        ),
    ]
